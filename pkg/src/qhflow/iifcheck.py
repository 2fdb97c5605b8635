"""Exact checks of inverse integrating factors, and truncated first integrals."""
from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from . import linalg
from .lieops import coordinates
from .qhgrade import QHType, basis, basis_exponents
from .ratpoly import PlanarField, SparsePolynomial, divergence, lie_derivative, rational


class NotClosed(ValueError):
    """No polynomial first integral matches the prescribed integrating factor."""

    def __init__(self, message: str, defect: SparsePolynomial):
        super().__init__(message)
        self.defect = defect


@dataclass(frozen=True)
class IifCandidate:
    w: SparsePolynomial
    s: mpq

    def __post_init__(self):
        if not self.w:
            raise ValueError("candidate base must be nonzero")
        if not self.s:
            raise ValueError("exponent must be nonzero")


def _truncated(defect: SparsePolynomial, t: QHType | None, cap: int | None):
    if cap is None:
        return defect
    t = t or QHType(1, 1)
    return defect.truncate(t.trunc(cap))


def verify_power_iif(f: PlanarField, cand: IifCandidate, truncate: int | None = None,
                     t: QHType | None = None):
    """Check ``s L_F(W) = div(F) W`` (equivalent to ``W^s`` being an inverse integrating factor).

    With ``truncate`` set only components of weighted degree up to it are compared.
    """
    s = rational(cand.s)
    defect = lie_derivative(f, cand.w) * s - divergence(f) * cand.w
    defect = _truncated(defect, t, truncate)
    return not defect, defect


def verify_polynomial_iif(f: PlanarField, v: SparsePolynomial, truncate: int | None = None,
                          t: QHType | None = None):
    if not v:
        raise ValueError("inverse integrating factor must be nonzero")
    defect = _truncated(lie_derivative(f, v) - divergence(f) * v, t, truncate)
    return not defect, defect


def lowest_degree(p: SparsePolynomial, t: QHType | None = None) -> int | None:
    t = t or QHType(1, 1)
    degs = p.weighted_degrees(t.t1, t.t2)
    return min(degs) if degs else None


def first_integral_truncated(f: PlanarField, v: SparsePolynomial, D: int) -> SparsePolynomial:
    """``H`` with ``H_x = Q/v``, ``H_y = -P/v`` up to total degree ``D``; ``H(0, 0) = 0``.

    Solved degree by degree as a linear system; an unsolvable degree raises NotClosed.
    """
    if not v.coeff(0, 0):
        raise ValueError("v must be a unit at the origin")
    t = QHType(1, 1)
    cap = t.trunc(D)
    # 1/v as a truncated series
    c0 = v.coeff(0, 0)
    rest = (v - c0) / c0
    inv = SparsePolynomial.const(1)
    term = SparsePolynomial.const(1)
    while True:
        term = (-term).mul(rest, cap)
        if not term:
            break
        inv = inv + term
    inv = inv / c0
    gx = f.q.mul(inv, cap)
    gy = (-f.p).mul(inv, cap)
    H = SparsePolynomial()
    for d in range(1, D + 1):
        unknowns = basis(t, d)
        target = basis_exponents(t, d - 1)
        cols = []
        for m in unknowns:
            cols.append(coordinates(m.dx(), target) + coordinates(m.dy(), target))
        rhs = (coordinates(gx.component(1, 1, d - 1), target)
               + coordinates(gy.component(1, 1, d - 1), target))
        x = linalg.solve(cols, rhs, 2 * len(target))
        if x is None:
            defect = (gx.component(1, 1, d - 1).dy() - gy.component(1, 1, d - 1).dx())
            raise NotClosed(f"mixed partials disagree in degree {d - 2}", defect)
        for c, m in zip(x, unknowns):
            if c:
                H = H + m * c
    return H
