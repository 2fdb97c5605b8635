"""Quasi-homogeneous gradings: types, bases, graded pieces of polynomials and fields."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .ratpoly import (
    PlanarField,
    SparsePolynomial,
    divergence,
    euler_field,
    hamiltonian_field,
    wedge,
)


class NotHamiltonian(ValueError):
    """A quasi-homogeneous field that is not of the form X_h."""

    def __init__(self, message: str, residue: SparsePolynomial | None = None):
        super().__init__(message)
        self.residue = residue


@dataclass(frozen=True)
class QHType:
    t1: int
    t2: int

    def __post_init__(self):
        if self.t1 < 1 or self.t2 < 1:
            raise ValueError(f"type weights must be positive, got ({self.t1}, {self.t2})")
        if gcd(self.t1, self.t2) != 1:
            raise ValueError(f"type ({self.t1}, {self.t2}) has a common factor")

    @classmethod
    def parse(cls, text: str) -> "QHType":
        a, b = (int(s) for s in text.replace(" ", "").split(","))
        return cls(a, b)

    @property
    def size(self) -> int:
        """|t| = t1 + t2."""
        return self.t1 + self.t2

    def trunc(self, cap: int) -> tuple:
        return (self.t1, self.t2, cap)

    def __str__(self):
        return f"{self.t1},{self.t2}"


def qh_degree(exponents: tuple[int, int], t: QHType) -> int:
    i, j = exponents
    return i * t.t1 + j * t.t2


def basis(t: QHType, k: int) -> list[SparsePolynomial]:
    """Monomials spanning the degree-``k`` space, by increasing y-exponent."""
    if k < 0:
        return []
    out = []
    for j in range(k // t.t2 + 1):
        rest = k - j * t.t2
        if rest % t.t1 == 0:
            out.append(SparsePolynomial.monomial(rest // t.t1, j))
    return out


def basis_exponents(t: QHType, k: int) -> list[tuple[int, int]]:
    return [next(iter(m.terms)) for m in basis(t, k)]


def dim(t: QHType, k: int) -> int:
    return len(basis(t, k))


def index_set_complement(t: QHType, bound: int | None = None) -> set[int]:
    """Degrees ``k >= 1`` whose space of quasi-homogeneous polynomials is trivial."""
    limit = t.t1 * t.t2 - t.size
    if bound is not None and bound < limit:
        raise ValueError(f"bound {bound} below t1*t2 - |t| = {limit}; set would be incomplete")
    return {k for k in range(1, max(limit, 0) + 1) if not basis(t, k)}


def is_quasi_homogeneous(f: SparsePolynomial, t: QHType, k: int | None = None) -> bool:
    degs = f.weighted_degrees(t.t1, t.t2)
    if not degs:
        return True
    return len(degs) == 1 and (k is None or degs == {k})


def qh_degree_of(f: SparsePolynomial, t: QHType) -> int:
    degs = f.weighted_degrees(t.t1, t.t2)
    if len(degs) != 1:
        raise ValueError(f"{f} is not quasi-homogeneous of type {t}")
    return degs.pop()


@dataclass(frozen=True)
class GradedPoly:
    type: QHType
    components: dict

    @classmethod
    def of(cls, f: SparsePolynomial, t: QHType) -> "GradedPoly":
        return cls(t, {k: f.component(t.t1, t.t2, k)
                       for k in sorted(f.weighted_degrees(t.t1, t.t2))})

    def total(self) -> SparsePolynomial:
        return sum(self.components.values(), SparsePolynomial())


@dataclass(frozen=True)
class GradedField:
    """Field components keyed by field degree ``j`` (P of degree j+t1, Q of degree j+t2)."""

    type: QHType
    components: dict = field(default_factory=dict)

    @property
    def r(self) -> int:
        return min(self.components)

    def total(self) -> PlanarField:
        out = PlanarField(SparsePolynomial(), SparsePolynomial())
        for comp in self.components.values():
            out = out + comp
        return out

    def __getitem__(self, j: int) -> PlanarField:
        return self.components.get(j, PlanarField(SparsePolynomial(), SparsePolynomial()))


def field_component(f: PlanarField, t: QHType, j: int) -> PlanarField:
    return PlanarField(f.p.component(t.t1, t.t2, j + t.t1), f.q.component(t.t1, t.t2, j + t.t2))


def field_degrees(f: PlanarField, t: QHType) -> set[int]:
    return ({d - t.t1 for d in f.p.weighted_degrees(t.t1, t.t2)}
            | {d - t.t2 for d in f.q.weighted_degrees(t.t1, t.t2)})


def truncate_field(f: PlanarField, t: QHType, cap: int) -> PlanarField:
    """Drop every component of field degree above ``cap``."""
    return PlanarField(f.p.truncate(t.trunc(cap + t.t1)), f.q.truncate(t.trunc(cap + t.t2)))


def decompose_field(f: PlanarField, t: QHType) -> GradedField:
    if not f:
        raise ValueError("the zero field has no quasi-homogeneous expansion")
    return GradedField(t, {j: field_component(f, t, j) for j in sorted(field_degrees(f, t))})


def euler(t: QHType) -> PlanarField:
    return euler_field(t.t1, t.t2)


def split_conservative_dissipative(fk: PlanarField, t: QHType, k: int | None = None):
    """Write ``fk = X_g + mu D0``; returns ``(g, mu)``.

    ``k`` defaults to the field degree of ``fk``.
    """
    if not fk:
        return SparsePolynomial(), SparsePolynomial()
    if k is None:
        degs = field_degrees(fk, t)
        if len(degs) != 1:
            raise ValueError("field is not quasi-homogeneous")
        k = degs.pop()
    n = k + t.size
    if n == 0:
        raise ValueError("k + |t| = 0: splitting undefined")
    d0 = euler(t)
    g = wedge(d0, fk) / n
    mu = divergence(fk) / n
    if hamiltonian_field(g) + d0.scale(mu) != fk:
        raise AssertionError("conservative/dissipative split failed to reconstruct the field")
    return g, mu


def hamiltonian_potential(fr: PlanarField, t: QHType, r: int | None = None) -> SparsePolynomial:
    """Return ``h`` with ``X_h == fr``; raises NotHamiltonian otherwise."""
    g, mu = split_conservative_dissipative(fr, t, r)
    if mu:
        raise NotHamiltonian(f"leading part {fr} is not Hamiltonian (dissipative part {mu})",
                             residue=mu)
    return g


def suggest_types(f: PlanarField, max_weight: int = 12) -> list[QHType]:
    """Types read off the lower Newton-diagram edges of ``f``.

    Points are the field exponents: ``(i-1, j)`` for P-terms, ``(i, j-1)`` for Q-terms.
    """
    pts = sorted({(i - 1, j) for i, j in f.p.terms} | {(i, j - 1) for i, j in f.q.terms})
    if len(pts) < 2:
        return [QHType(1, 1)]
    # lower-left convex hull (monotone chain)
    hull: list = []
    for pt in pts:
        while len(hull) >= 2:
            (ax, ay), (bx, by) = hull[-2], hull[-1]
            if (bx - ax) * (pt[1] - ay) - (by - ay) * (pt[0] - ax) <= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    out = []
    for (ax, ay), (bx, by) in zip(hull, hull[1:]):
        dx, dy = bx - ax, ay - by
        if dx > 0 and dy > 0:
            g = gcd(dx, dy)
            t1, t2 = dy // g, dx // g
            if t1 <= max_weight and t2 <= max_weight:
                out.append(QHType(t1, t2))
    return out or [QHType(1, 1)]
