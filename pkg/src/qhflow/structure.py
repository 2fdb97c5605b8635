"""Hypotheses on the leading Hamiltonian: squarefreeness, complement condition, monodromy."""
from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from . import linalg
from .lieops import coordinates, operator_decomposition
from .qhgrade import QHType, basis, basis_exponents, index_set_complement, qh_degree_of
from .ratpoly import SparsePolynomial, sturm_real_root_count, univariate_gcd


class HypothesisError(ValueError):
    """The leading Hamiltonian violates a standing hypothesis."""


@dataclass(frozen=True)
class UnivariateReduction:
    """``h = x^i0 y^j0 * sum_j q_j x^(t2 (K-j)) y^(t1 j)`` with ``q(s) = sum_j q_j s^j``."""

    i0: int
    j0: int
    q: SparsePolynomial  # univariate in x, standing for s
    K: int

    def rebuild(self, t: QHType) -> SparsePolynomial:
        out = {}
        for (j, _), c in self.q.items():
            out[(self.i0 + t.t2 * (self.K - j), self.j0 + t.t1 * j)] = c
        return SparsePolynomial(out)


@dataclass
class HypothesisReport:
    h1: bool
    h2: bool
    h2_checked_degrees: list = field(default_factory=list)
    monodromic: bool = False
    sign: int = 0
    n0: int = 0


def univariate_reduction(h: SparsePolynomial, t: QHType) -> UnivariateReduction:
    if not h:
        raise ValueError("univariate reduction of the zero polynomial")
    qh_degree_of(h, t)
    i0 = min(i for i, _ in h.terms)
    j0 = min(j for _, j in h.terms)
    K = (max(j for _, j in h.terms) - j0) // t.t1
    q = SparsePolynomial({((j - j0) // t.t1, 0): c for (i, j), c in h.items()})
    return UnivariateReduction(i0, j0, q, K)


def check_h1(h: SparsePolynomial, t: QHType) -> bool:
    """Only simple factors over C[x, y]."""
    red = univariate_reduction(h, t)
    if red.i0 > 1 or red.j0 > 1:
        return False
    if red.K == 0:
        return True
    return univariate_gcd(red.q, red.q.dx()).is_constant()


def h2_degrees(t: QHType, r: int) -> list[int]:
    trivial = index_set_complement(t)
    return list(range(1, r + 1)) + sorted(j for j in (r + m for m in trivial) if j > r)


def complement_holds(h: SparsePolynomial, t: QHType, j: int) -> bool:
    """``h * P_j`` together with the operator range spans degree ``r + |t| + j``."""
    r = qh_degree_of(h, t) - t.size
    dec = operator_decomposition(h, t, r + t.size + j)
    exps = basis_exponents(t, r + t.size + j)
    n = len(exps)
    if n == 0:
        return True
    vecs = [coordinates(b, exps) for b in dec.range_basis]
    vecs += [coordinates(h * m, exps) for m in basis(t, j)]
    return linalg.rank(linalg.columns_to_rows(vecs, n)) == n


def check_h2(h: SparsePolynomial, t: QHType) -> tuple[bool, list[int]]:
    r = qh_degree_of(h, t) - t.size
    checked = []
    for j in h2_degrees(t, r):
        checked.append(j)
        if not complement_holds(h, t, j):
            return False, checked
    return True, checked


def is_monodromic(h: SparsePolynomial, t: QHType) -> tuple[bool, int]:
    """``h`` vanishes only at the origin; returns ``(flag, sign of h)``."""
    red = univariate_reduction(h, t)
    if red.i0 or red.j0:
        return False, 0
    for xv in (1, -1):
        slice_ = SparsePolynomial({(j, 0): c * mpq(xv) ** i for (i, j), c in h.items()})
        if slice_.is_constant():
            continue
        if sturm_real_root_count(slice_) > 0:
            return False, 0
    v = h(mpq(1), mpq(0))
    return True, (1 if v > 0 else -1)


def compute_n0(t: QHType, r: int) -> int:
    trivial = index_set_complement(t)
    return 1 + r + (max(trivial) if trivial else 0)


def check_hypotheses(h: SparsePolynomial, t: QHType) -> HypothesisReport:
    r = qh_degree_of(h, t) - t.size
    h1 = check_h1(h, t)
    h2, checked = check_h2(h, t) if h1 else (False, [])
    mono, sign = is_monodromic(h, t)
    return HypothesisReport(h1=h1, h2=h2, h2_checked_degrees=checked, monodromic=mono,
                            sign=sign, n0=compute_n0(t, r))
