"""Orbital normal form ``X_h + mu D0`` degree by degree, and the AIIF classification."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from gmpy2 import mpq

from . import linalg
from .lieops import (
    combine,
    coordinates,
    operator_decomposition,
    poisson,
    solve_in_range,
)
from .qhgrade import (
    GradedField,
    NotHamiltonian,
    QHType,
    basis,
    basis_exponents,
    euler,
    field_component,
    field_degrees,
    index_set_complement,
    qh_degree_of,
    split_conservative_dissipative,
    truncate_field,
)
from .ratpoly import PlanarField, SparsePolynomial, X, Y, hamiltonian_field
from .structure import HypothesisError, check_h1


@dataclass(frozen=True)
class NormalFormStep:
    """Degree-``k`` generator: coordinates ``x -> x + X_p + xi D0``, time factor ``1 + rho``."""

    degree: int
    p: SparsePolynomial
    xi: SparsePolynomial
    rho: SparsePolynomial

    @property
    def trivial(self) -> bool:
        return not (self.p or self.xi or self.rho)


@dataclass(frozen=True)
class NormalFormResult:
    h: SparsePolynomial
    type: QHType
    r: int
    D: int
    mu: dict  # degree -> coordinates on corange[degree]
    corange: dict  # degree -> corange basis polynomials
    steps: list
    field: PlanarField  # reduced field, truncated at D
    N: int | None = None
    second_stage_mu: dict | None = None

    def mu_poly(self, j: int) -> SparsePolynomial:
        return combine(self.mu.get(j, []), self.corange.get(j, []))

    def nonzero_degrees(self) -> list[int]:
        return [j for j in sorted(self.mu) if any(self.mu[j])]


@dataclass(frozen=True)
class Verdict:
    kind: str  # "IntegrableUpToD" | "AIIF" | "NoAIIF"
    D: int
    N: int | None = None
    exponent: mpq | None = None
    witness_degree: int | None = None
    formal_iif: bool = False
    notes: tuple = ()


def default_degree(t: QHType, r: int) -> int:
    trivial = index_set_complement(t)
    return r + 2 * (r + t.size) + max(trivial | {0})


# -- transformations ----------------------------------------------------------

def _cap(t: QHType, D: int) -> tuple:
    return t.trunc(D + max(t.t1, t.t2))


def apply_step(f: PlanarField, t: QHType, D: int, step: NormalFormStep,
               h: SparsePolynomial | None = None) -> PlanarField:
    """``(1 + rho) · DΦ⁻¹ · f∘Φ`` with ``Φ = id + X_p + xi D0``, truncated at field degree D."""
    gen = PlanarField(SparsePolynomial(), SparsePolynomial())
    if step.p:
        gen = gen + hamiltonian_field(step.p)
    if step.xi:
        gen = gen + euler(t).scale(step.xi)
    cap = _cap(t, D)
    out = f
    if gen:
        comp = PlanarField(f.p.subs(X + gen.p, Y + gen.q, cap), f.q.subs(X + gen.p, Y + gen.q, cap))
        comp = truncate_field(comp, t, D)
        out, term = comp, comp
        a, b, c, d = gen.p.dx(), gen.p.dy(), gen.q.dx(), gen.q.dy()
        while term:
            term = truncate_field(PlanarField(-(a.mul(term.p, cap) + b.mul(term.q, cap)),
                                              -(c.mul(term.p, cap) + d.mul(term.q, cap))), t, D)
            out = out + term
    if step.rho:
        out = truncate_field(PlanarField(out.p + step.rho.mul(out.p, cap),
                                         out.q + step.rho.mul(out.q, cap)), t, D)
    return out


def _conservative_solve(h, t, r, k, g):
    """``g = {h, p} + h tau`` with tau of degree k - r (pivot solution)."""
    n = k + t.size
    dec = operator_decomposition(h, t, n)
    exps = basis_exponents(t, n)
    hb = basis(t, k - r)
    cols = [coordinates(b, exps) for b in dec.range_basis] + [coordinates(h * m, exps) for m in hb]
    x = linalg.solve(cols, coordinates(g, exps), len(exps)) if exps else []
    if x is None:
        raise HypothesisError(f"h * P_{k - r} does not complement the range into degree {n}")
    m = len(dec.range_basis)
    p = combine(x[:m], [dec.domain_basis[c] for c in dec.range_pivots])
    tau = combine(x[m:], hb)
    return p, tau


def degree_step(h: SparsePolynomial, t: QHType, r: int, k: int, fk: PlanarField):
    """First-order generator data for the degree-``k`` component.

    Returns ``(step, corange coordinates of the surviving mu)``.
    """
    n = k + t.size
    g, mu = split_conservative_dissipative(fk, t, k)
    p, tau = _conservative_solve(h, t, r, k, g) if g else (SparsePolynomial(), SparsePolynomial())
    sigma = tau * mpq(n, r + t.size)
    dec = operator_decomposition(h, t, k, True)
    sol = solve_in_range(dec, mu - poisson(h, sigma) / n)
    xi = sol.p
    rho = -(sigma + xi * r)
    return NormalFormStep(k, p, xi, rho), sol.coords


def leading_check(f: PlanarField, h: SparsePolynomial, t: QHType) -> int:
    r = qh_degree_of(h, t) - t.size
    degs = field_degrees(f, t)
    if min(degs) < r:
        raise NotHamiltonian(f"field has components below degree {r}")
    if field_component(f, t, r) != hamiltonian_field(h):
        raise NotHamiltonian(f"degree-{r} component is not X_h for h = {h}")
    return r


def normal_form(f, h: SparsePolynomial, D: int | None = None, t: QHType | None = None
                ) -> NormalFormResult:
    """Reduce ``f`` so each component of degree ``r < k <= D`` is ``mu_k D0``, mu_k in the corange."""
    if isinstance(f, GradedField):
        t = f.type if t is None else t
        f = f.total()
    if t is None:
        raise ValueError("a quasi-homogeneous type is required")
    r = leading_check(f, h, t)
    if not check_h1(h, t):
        raise HypothesisError(f"h = {h} has a repeated factor")
    D = default_degree(t, r) if D is None else D
    if D <= r:
        raise ValueError(f"truncation degree {D} must exceed r = {r}")
    F = truncate_field(f, t, D)
    steps, mu, corange = [], {}, {}
    for k in range(r + 1, D + 1):
        fk = field_component(F, t, k)
        step, coords = degree_step(h, t, r, k, fk)
        corange[k] = operator_decomposition(h, t, k, True).corange_basis
        mu[k] = coords
        steps.append(step)
        if not step.trivial:
            F = apply_step(F, t, D, step)
            expected = euler(t).scale(combine(coords, corange[k]))
            if field_component(F, t, k) != expected:
                raise AssertionError(f"degree {k} did not reduce to the corange")
    nz = [j for j in sorted(mu) if any(mu[j])]
    N = nz[0] - r if nz else None
    return NormalFormResult(h=h, type=t, r=r, D=D, mu=mu, corange=corange, steps=steps,
                            field=F, N=N)


def replay(f: PlanarField, t: QHType, D: int, steps: list) -> PlanarField:
    F = truncate_field(f, t, D)
    for step in steps:
        if not step.trivial:
            F = apply_step(F, t, D, step)
    return F


# -- second stage and classification -----------------------------------------

def resonant_degrees(nf: NormalFormResult) -> dict:
    """``{k: l}`` for ``k = r + N + l (r + |t|) <= D``, ``l >= 1``."""
    if nf.N is None:
        return {}
    step = nf.r + nf.type.size
    base = nf.r + nf.N
    return {base + l * step: l for l in range(1, (nf.D - base) // step + 1)}


def resonant_direction(nf: NormalFormResult, k: int, l: int) -> list:
    lead = nf.mu_poly(nf.r + nf.N)
    dec = operator_decomposition(nf.h, nf.type, k, True)
    return solve_in_range(dec, lead * nf.h ** l).coords


def second_stage(nf: NormalFormResult) -> NormalFormResult:
    """Reduce resonant degrees modulo the direction ``mu_{r+N} h^l`` (projected on the corange)."""
    if nf.N is None:
        return replace(nf, second_stage_mu=dict(nf.mu))
    out = dict(nf.mu)
    for k, l in resonant_degrees(nf).items():
        d = resonant_direction(nf, k, l)
        lead = next((i for i, v in enumerate(d) if v), None)
        if lead is None:
            continue
        c = out[k][lead] / d[lead]
        out[k] = [a - c * b for a, b in zip(out[k], d)]
    return replace(nf, second_stage_mu=out)


def resonant_profile(nf: NormalFormResult) -> dict:
    """``{l: c_l}`` with ``mu_k = c_l mu_{r+N} h^l`` at resonant degrees (exact multiples only)."""
    out = {}
    for k, l in resonant_degrees(nf).items():
        d = resonant_direction(nf, k, l)
        lead = next((i for i, v in enumerate(d) if v), None)
        if lead is None:
            continue
        c = nf.mu[k][lead] / d[lead]
        if [c * v for v in d] == list(nf.mu[k]) and c:
            out[l] = c
    return out


def classify_aiif(nf: NormalFormResult) -> Verdict:
    if nf.second_stage_mu is None:
        nf = second_stage(nf)
    if nf.N is None:
        return Verdict("IntegrableUpToD", nf.D, notes=(f"formally integrable up to degree {nf.D}",))
    size = nf.r + nf.type.size
    s = 1 + mpq(nf.N, size)
    formal = nf.N % size == 0
    for j in sorted(nf.second_stage_mu):
        if j > nf.r + nf.N and any(nf.second_stage_mu[j]):
            return Verdict("NoAIIF", nf.D, N=nf.N, witness_degree=j,
                           notes=(f"residual at degree {j} obstructs an algebraic inverse "
                                  f"integrating factor",))
    return Verdict("AIIF", nf.D, N=nf.N, exponent=s, formal_iif=formal,
                   notes=(f"AIIF (h + hot)^{s} up to degree {nf.D}",
                          "in the original coordinates the AIIF may carry a factor exp(u) for "
                          "a series u; only the power form is built and verified"))


# -- leading part of the AIIF --------------------------------------------------

def _compose_map(psi: PlanarField, gen: PlanarField, cap) -> PlanarField:
    return PlanarField(psi.p.subs(X + gen.p, Y + gen.q, cap), psi.q.subs(X + gen.p, Y + gen.q, cap))


def accumulated_transform(nf: NormalFormResult, cap_degree: int):
    """Total map ``x = Ψ(y)`` and time factor ``E`` with ``G = E · DΨ⁻¹ · F∘Ψ``."""
    t = nf.type
    cap = t.trunc(cap_degree)
    psi = PlanarField(X, Y)
    E = SparsePolynomial.const(1)
    for step in nf.steps:
        if step.trivial:
            continue
        gen = PlanarField(SparsePolynomial(), SparsePolynomial())
        if step.p:
            gen = gen + hamiltonian_field(step.p)
        if step.xi:
            gen = gen + euler(t).scale(step.xi)
        if gen:
            psi = _compose_map(psi, gen, cap)
            E = E.subs(X + gen.p, Y + gen.q, cap)
        E = (E + step.rho.mul(E, cap)).truncate(cap)
    return psi, E


def invert_map(psi: PlanarField, cap) -> PlanarField:
    """Inverse of a near-identity polynomial map, truncated."""
    rp, rq = psi.p - X, psi.q - Y
    z = PlanarField(X, Y)
    for _ in range(cap[2] + 1):
        nxt = PlanarField((X - rp.subs(z.p, z.q, cap)).truncate(cap),
                          (Y - rq.subs(z.p, z.q, cap)).truncate(cap))
        if nxt == z:
            break
        z = nxt
    return z


def unit_power(u: SparsePolynomial, s: mpq, cap) -> SparsePolynomial:
    """``u^s`` for ``u(0) = 1`` as a truncated binomial series."""
    if u.coeff(0, 0) != 1:
        raise ValueError("unit_power needs u(0, 0) = 1")
    v = (u - 1).truncate(cap)
    out = SparsePolynomial.const(1)
    term = SparsePolynomial.const(1)
    coef = mpq(1)
    n = 0
    while True:
        term = term.mul(v, cap)
        if not term:
            break
        coef = coef * (s - n) / (n + 1)
        n += 1
        out = out + term * coef
    return out


def aiif_leading_part(nf: NormalFormResult):
    """Pull ``h`` (times the unit corrections) back to the original coordinates.

    Returns ``(W, s)`` where ``W^s`` is an inverse integrating factor of the input
    up to the truncation, or ``(W, None)`` with ``W`` a truncated first integral
    when the system is integrable up to D.
    """
    t = nf.type
    wcap = t.trunc(nf.D + t.size)
    verdict = classify_aiif(nf)
    psi, E = accumulated_transform(nf, nf.D + t.size)
    inv = invert_map(psi, wcap)
    if verdict.kind == "IntegrableUpToD":
        return nf.h.subs(inv.p, inv.q, wcap), None
    if verdict.kind != "AIIF":
        raise ValueError("no algebraic inverse integrating factor up to the truncation")
    s = verdict.exponent
    J = (psi.p.dx().mul(psi.q.dy(), wcap) - psi.p.dy().mul(psi.q.dx(), wcap)).truncate(wcap)
    Einv = unit_power(E, mpq(-1), wcap)
    unit = J.mul(Einv, wcap)
    f = SparsePolynomial.const(1)
    for l, c in resonant_profile(nf).items():
        f = f + nf.h ** l * c
    unit = unit.mul(f, wcap)
    U = nf.h.mul(unit_power(unit.truncate(wcap), 1 / s, wcap), wcap)
    return U.subs(inv.p, inv.q, wcap), s


# -- series recursion along the resonant chain ----------------------------------

def aiif_series_obstruction(h: SparsePolynomial, t: QHType, mu: dict, N: int, D: int):
    """Solve for ``b_j`` (``b_1 = 1``) along the resonant chain of ``mu``.

    ``mu`` maps degrees to polynomials.  Returns ``(b, obstruction_degree)``.
    """
    r = qh_degree_of(h, t) - t.size
    size = r + t.size
    lead = mu.get(r + N, SparsePolynomial())
    if not lead:
        raise ValueError("mu_{r+N} must be nonzero")

    def chain(i):
        return mu.get(r + N + i * size, SparsePolynomial())

    b = {1: mpq(1)}
    j = 2
    while r + N + (j - 1) * size <= D:
        rhs = SparsePolynomial()
        for i in range(1, j):
            coef = mpq(N + (1 + i) * size, size + N) - (j - i)
            rhs = rhs + h ** (j - i) * chain(i) * (coef * b[j - i])
        # (j - 1) b_j h^j mu_{r+N} = rhs
        base = h ** j * lead * (j - 1)
        ratio = _proportionality(rhs, base)
        if ratio is None:
            return b, r + N + (j - 1) * size
        b[j] = ratio
        j += 1
    return b, None


def _proportionality(a: SparsePolynomial, b: SparsePolynomial):
    if not a:
        return mpq(0)
    e, c = next(iter(b.items()))
    ratio = a.coeff(*e) / c
    return ratio if a == b * ratio else None
