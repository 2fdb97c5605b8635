"""Generalized trigonometric functions of a definite Hamiltonian and Poincaré integrals.

``(Cs, Sn)`` solves ``x' = X_h(x)`` from ``(x0, 0)``; integrals of polynomials along one
period ride along as extra states of the same adaptive Dormand-Prince integration.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .lieops import operator_decomposition, range_contains
from .qhgrade import QHType, qh_degree_of
from .ratpoly import SparsePolynomial
from .structure import is_monodromic

RTOL = 1e-12
ATOL = 1e-14

# sign symmetries (sx, sy) tried for parity certificates
SYMMETRIES = ((-1, 1), (1, -1), (-1, -1))


class PreconditionError(ValueError):
    """The Hamiltonian is not definite positive."""


class NumericalFailure(RuntimeError):
    """The orbit did not close within the tolerance budget."""


class _Evaluator:
    """Vectorised float evaluation of a polynomial and its gradient."""

    def __init__(self, p: SparsePolynomial):
        items = list(p.items())
        self.i = np.array([e[0] for e, _ in items], dtype=float)
        self.j = np.array([e[1] for e, _ in items], dtype=float)
        self.c = np.array([float(c) for _, c in items], dtype=float)

    def __call__(self, x: float, y: float) -> float:
        if not self.c.size:
            return 0.0
        return float(np.sum(self.c * x ** self.i * y ** self.j))


@dataclass
class TrigTable:
    h: SparsePolynomial
    type: QHType
    start: tuple
    level: float
    theta: np.ndarray
    cs: np.ndarray
    sn: np.ndarray
    period: float
    tolerance: float
    energy_defect: float = 0.0
    closure_defect: float = 0.0

    @property
    def samples(self):
        return list(zip(self.theta, self.cs, self.sn))


@dataclass(frozen=True)
class IntegralResult:
    value: float
    abs_error_estimate: float
    exact_zero_certificate: bool = False
    certificate: str = ""


@dataclass
class QuarticIntegralReport:
    integrals: dict = field(default_factory=dict)  # (n, k) -> IntegralResult
    recurrence_defects: dict = field(default_factory=dict)  # (n, k) -> relative defect
    odd_certified: bool = True
    max_relative_defect: float = 0.0
    ratio_00_22: float = float("nan")
    ratio_defect_00_22: float = float("nan")
    defect_20_02: float = float("nan")


def _rhs(h: SparsePolynomial, integrands: list):
    hx, hy = _Evaluator(h.dx()), _Evaluator(h.dy())
    evs = [_Evaluator(m) for m in integrands]

    def f(_, z):
        x, y = z[0], z[1]
        return [-hy(x, y), hx(x, y)] + [e(x, y) for e in evs]

    return f


def _check_definite(h: SparsePolynomial, t: QHType):
    mono, sign = is_monodromic(h, t)
    if not mono:
        raise PreconditionError(f"h = {h} is not definite, the origin is not monodromic")
    if sign < 0:
        raise PreconditionError("h is negative definite; negate h (and time) first")


def _integrate(h, t, x0, integrands, rtol, atol, t_end=None, max_period=None):
    """Two-phase run: first the crossing of ``Sn = 0`` on the negative axis, then the return."""
    f = _rhs(h, integrands)
    z0 = [x0, 0.0] + [0.0] * len(integrands)
    if t_end is not None:
        sol = solve_ivp(f, (0.0, t_end), z0, method="RK45", rtol=rtol, atol=atol)
        if sol.status != 0:
            raise NumericalFailure(sol.message)
        return sol, t_end

    def down(_, z):
        return z[1]
    down.terminal, down.direction = True, -1

    def up(_, z):
        return z[1]
    up.terminal, up.direction = True, 1

    horizon = max_period or 1e6
    first = solve_ivp(f, (0.0, horizon), z0, method="RK45", rtol=rtol, atol=atol, events=down)
    if first.status != 1 or not first.t_events[0].size:
        raise NumericalFailure("orbit never crossed the negative axis")
    t1 = first.t_events[0][0]
    z1 = first.y_events[0][0]
    second = solve_ivp(f, (t1, t1 + horizon), z1, method="RK45", rtol=rtol, atol=atol,
                       events=up)
    if second.status != 1 or not second.t_events[0].size:
        raise NumericalFailure("orbit never returned to the positive axis")
    T = second.t_events[0][0]
    ts = np.concatenate([first.t[:-1], [t1], second.t[1:-1], [T]])
    zs = np.concatenate([first.y[:, :-1], z1[:, None], second.y[:, 1:-1],
                         second.y_events[0][0][:, None]], axis=1)

    class _Sol:
        pass
    sol = _Sol()
    sol.t, sol.y = ts, zs
    return sol, T


def generalized_trig(h: SparsePolynomial, t: QHType, tol: float = 1e-9, x0: float = 1.0,
                     rtol: float = RTOL, atol: float = ATOL, emit_csv: str | None = None
                     ) -> TrigTable:
    """Tabulate ``(Cs, Sn)`` over one period for positive definite ``h``.

    Parameters
    ----------
    h : SparsePolynomial
        Quasi-homogeneous, positive definite.
    t : QHType
    tol : float
        Acceptance budget for the energy and closure defects.
    x0 : float
        Start ``(x0, 0)``; the level is ``h(x0, 0)``.
    emit_csv : str, optional
        Path for the ``theta,cs,sn`` dump, one row per accepted step.
    """
    _check_definite(h, t)
    sol, T = _integrate(h, t, x0, [], rtol, atol)
    level = h.evalf(x0, 0.0)
    hev = _Evaluator(h)
    cs, sn = sol.y[0], sol.y[1]
    energy = max(abs(hev(a, b) - level) for a, b in zip(cs, sn)) / abs(level)
    closure = math.hypot(cs[-1] - x0, sn[-1])
    if energy > tol or closure > tol * max(1.0, abs(x0)):
        raise NumericalFailure(f"energy drift {energy:.3g}, closure defect {closure:.3g} "
                               f"exceed tolerance {tol:.3g}")
    table = TrigTable(h=h, type=t, start=(x0, 0.0), level=level, theta=sol.t, cs=cs, sn=sn,
                      period=T, tolerance=tol, energy_defect=energy, closure_defect=closure)
    if emit_csv:
        write_csv(emit_csv, table)
    return table


def write_csv(path: str, table: TrigTable, integrands: dict | None = None):
    """Rows ``theta,cs,sn,<name>...``; running integrals are recomputed along the table."""
    integrands = integrands or {}
    names = sorted(integrands)
    running = {}
    if names:
        sol, _ = _integrate(table.h, table.type, table.start[0],
                            [integrands[n] for n in names], RTOL, ATOL)
        for k, n in enumerate(names):
            running[n] = np.interp(table.theta, sol.t, sol.y[2 + k])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "cs", "sn"] + names)
        for idx, (a, b, c) in enumerate(zip(table.theta, table.cs, table.sn)):
            w.writerow([repr(float(a)), repr(float(b)), repr(float(c))]
                       + [repr(float(running[n][idx])) for n in names])


# -- certificates ---------------------------------------------------------------

def symmetries_of(h: SparsePolynomial) -> list[tuple[int, int]]:
    return [s for s in SYMMETRIES
            if all(c == c * s[0] ** i * s[1] ** j for (i, j), c in h.items())]


def parity_certificate(h: SparsePolynomial, mu: SparsePolynomial) -> str:
    """Name of a sign symmetry of ``h`` making every monomial of ``mu`` odd, or ``""``."""
    syms = symmetries_of(h)
    if not mu:
        return "zero"
    for (i, j), _ in mu.items():
        if not any(sx ** i * sy ** j == -1 for sx, sy in syms):
            return ""
    return "parity"


def range_certificate(h: SparsePolynomial, t: QHType, mu: SparsePolynomial) -> str:
    """``mu`` is a Poisson bracket ``{h, p}``; its integral over a closed orbit vanishes."""
    if not mu:
        return "zero"
    try:
        j = qh_degree_of(mu, t)
    except ValueError:
        return ""
    dec = operator_decomposition(h, t, j)
    return "range" if range_contains(dec, mu) else ""


# -- integrals ----------------------------------------------------------------------

def _quadrature(table: TrigTable, polys: list, rtol: float, atol: float) -> list[float]:
    sol, _ = _integrate(table.h, table.type, table.start[0], polys, rtol, atol,
                        t_end=table.period)
    return [float(v) for v in sol.y[2:, -1]]


def integrate_polynomial(table: TrigTable, mu: SparsePolynomial, certificate: str = "",
                         rtol: float = RTOL, atol: float = ATOL) -> IntegralResult:
    if certificate:
        return IntegralResult(0.0, 0.0, True, certificate)
    fine = _quadrature(table, [mu], rtol, atol)[0]
    coarse = _quadrature(table, [mu], rtol * 100, atol * 100)[0]
    scale = table.period * max(abs(mu.evalf(a, b)) for a, b in zip(table.cs, table.sn))
    err = abs(fine - coarse) + 1e-14 * scale + table.closure_defect * scale
    return IntegralResult(fine, err, False, "")


def monomial_integral(table: TrigTable, n: int, k: int) -> IntegralResult:
    """``I_{n,k}``: the integral of ``Cs^n Sn^k`` over one period."""
    m = SparsePolynomial.monomial(n, k)
    return integrate_polynomial(table, m, parity_certificate(table.h, m))


def poincare_integral(table: TrigTable, mu: SparsePolynomial) -> IntegralResult:
    """Integral of ``mu(Cs, Sn)`` over one period of the table's orbit."""
    cert = parity_certificate(table.h, mu) or range_certificate(table.h, table.type, mu)
    return integrate_polynomial(table, mu, cert)


def signed_poincare_integral(h: SparsePolynomial, t: QHType, mu: SparsePolynomial,
                             tol: float = 1e-9) -> tuple[int, IntegralResult]:
    """Handle negative definite ``h`` by reversing time.

    Returns ``(sign, I)`` where ``I`` is the integral for the positive definite system
    ``(sign h, sign mu)``, so that ``sign * I`` decides stability of the original.
    """
    mono, sign = is_monodromic(h, t)
    if not mono:
        raise PreconditionError(f"h = {h} is not definite, the origin is not monodromic")
    table = generalized_trig(h * sign, t, tol)
    res = poincare_integral(table, mu * sign)
    return sign, res


def center_verdict(sign_h: int, res: IntegralResult, tol: float = 1e-10,
                   scale: float = 1.0) -> str:
    if res.exact_zero_certificate:
        return "Center"
    v = sign_h * res.value
    if abs(res.value) <= max(tol * scale, res.abs_error_estimate):
        return "Inconclusive"
    return "UnstableFocus" if v > 0 else "StableFocus"


# -- the quartic catalogue -----------------------------------------------------------

def quartic_integral_suite(table: TrigTable, max_nk: int = 2) -> QuarticIntegralReport:
    """Odd vanishing and the even recurrence

    ``I_{2n+2,2k+2} = (2n+1)(2k+1) / (4 (n+k+2)(n+k+1)) I_{2n,2k}``

    for ``n, k <= max_nk`` on the quartic table.
    """
    rep = QuarticIntegralReport()
    top = 2 * max_nk + 2
    for n in range(top + 1):
        for k in range(top + 1):
            res = monomial_integral(table, n, k)
            rep.integrals[(n, k)] = res
            if (n % 2 or k % 2) and not res.exact_zero_certificate:
                rep.odd_certified = False
    worst = 0.0
    for n in range(max_nk + 1):
        for k in range(max_nk + 1):
            lhs = rep.integrals[(2 * n + 2, 2 * k + 2)].value
            rhs = ((2 * n + 1) * (2 * k + 1) / (4 * (n + k + 2) * (n + k + 1))
                   * rep.integrals[(2 * n, 2 * k)].value)
            d = abs(lhs - rhs) / abs(rhs)
            rep.recurrence_defects[(n, k)] = d
            worst = max(worst, d)
    rep.max_relative_defect = worst
    i00, i22 = rep.integrals[(0, 0)].value, rep.integrals[(2, 2)].value
    rep.ratio_00_22 = i00 / i22
    rep.ratio_defect_00_22 = abs(i00 - 8 * i22) / abs(i00)
    i20, i02 = rep.integrals[(2, 0)].value, rep.integrals[(0, 2)].value
    rep.defect_20_02 = abs(i20 - i02) / abs(i20)
    return rep
