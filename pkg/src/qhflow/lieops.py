"""Homological operators ``mu -> {h, mu}`` between quasi-homogeneous spaces."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from gmpy2 import mpq

from . import linalg
from .qhgrade import QHType, basis, basis_exponents, euler, qh_degree_of
from .ratpoly import PlanarField, SparsePolynomial, hamiltonian_field, lie_bracket


def poisson(h: SparsePolynomial, p: SparsePolynomial) -> SparsePolynomial:
    """``h_x p_y - h_y p_x``."""
    return h.dx() * p.dy() - h.dy() * p.dx()


def bracket_hamiltonian(h: SparsePolynomial, p: SparsePolynomial) -> PlanarField:
    return lie_bracket(hamiltonian_field(h), hamiltonian_field(p))


def bracket_with_euler(h: SparsePolynomial, xi: SparsePolynomial, t: QHType) -> PlanarField:
    return lie_bracket(hamiltonian_field(h), euler(t).scale(xi))


def coordinates(f: SparsePolynomial, exps: list[tuple[int, int]]) -> list:
    """Coefficients of ``f`` on a monomial basis; raises if ``f`` leaves the span."""
    index = {e: n for n, e in enumerate(exps)}
    out = [mpq(0)] * len(exps)
    for e, c in f.items():
        if e not in index:
            raise ValueError(f"term {e} of {f} is outside the basis")
        out[index[e]] = c
    return out


def combine(coeffs, polys) -> SparsePolynomial:
    out = SparsePolynomial()
    for c, p in zip(coeffs, polys):
        if c:
            out = out + p * c
    return out


@dataclass(frozen=True, eq=False)
class OperatorDecomposition:
    h: SparsePolynomial
    type: QHType
    j: int
    r: int
    domain_basis: list
    codomain_basis: list
    matrix: list  # rows indexed by codomain basis, columns by domain basis
    range_basis: list
    kernel_basis: list
    corange_basis: list
    range_pivots: list

    @property
    def codomain_exponents(self):
        return [next(iter(m.terms)) for m in self.codomain_basis]

    @property
    def rank(self) -> int:
        return len(self.range_basis)

    def apply(self, p: SparsePolynomial) -> SparsePolynomial:
        return poisson(self.h, p)

    def corange_coordinates(self, target: SparsePolynomial) -> list:
        return solve_in_range(self, target).coords

    def is_complement(self, span: list[SparsePolynomial]) -> bool:
        return is_complement(self, span)


class RangeSolution(NamedTuple):
    p: SparsePolynomial
    residual: SparsePolynomial
    coords: list  # residual coordinates on corange_basis


def _matrix(h, t, j, r):
    dom = basis(t, j - r)
    cod_exps = basis_exponents(t, j)
    cols = [coordinates(poisson(h, m), cod_exps) for m in dom]
    return dom, cod_exps, cols


@lru_cache(maxsize=4096)
def operator_decomposition(h: SparsePolynomial, t: QHType, j: int,
                           cyclic: bool = False) -> OperatorDecomposition:
    """Matrix, range, kernel and a deterministic corange of ``p -> {h, p}`` into degree ``j``.

    With ``cyclic`` set, corange candidates ``h * Cor(j - r - |t|)`` are tried
    before plain monomials whenever ``j - r - |t| > r``.
    """
    r = qh_degree_of(h, t) - t.size
    dom, cod_exps, cols = _matrix(h, t, j, r)
    cod = [SparsePolynomial.monomial(*e) for e in cod_exps]
    n = len(cod_exps)
    rows = linalg.columns_to_rows(cols, n) if cols else []
    pivots = linalg.independent_columns(cols, n)
    range_basis = [poisson(h, dom[c]) for c in pivots]
    kernel = [combine(v, dom) for v in linalg.nullspace(rows, len(dom))] if dom else []

    candidates = []
    lower = j - r - t.size
    if cyclic and lower > r:
        candidates = [h * c for c in operator_decomposition(h, t, lower, True).corange_basis]
    candidates += cod
    chosen = []
    span = [cols[c] for c in pivots]
    for cand in candidates:
        vec = coordinates(cand, cod_exps)
        if linalg.rank(linalg.columns_to_rows(span + [vec], n)) > len(span):
            span.append(vec)
            chosen.append(cand)
        if len(span) == n:
            break
    return OperatorDecomposition(h=h, type=t, j=j, r=r, domain_basis=dom, codomain_basis=cod,
                                 matrix=rows, range_basis=range_basis, kernel_basis=kernel,
                                 corange_basis=chosen, range_pivots=pivots)


def solve_in_range(dec: OperatorDecomposition, target: SparsePolynomial) -> RangeSolution:
    """Split ``target = {h, p} + residual`` with residual in the corange span."""
    exps = dec.codomain_exponents
    n = len(exps)
    cols = [coordinates(b, exps) for b in dec.range_basis]
    cols += [coordinates(c, exps) for c in dec.corange_basis]
    x = linalg.solve(cols, coordinates(target, exps), n)
    if x is None:
        raise AssertionError("range and corange do not span the codomain")
    k = len(dec.range_basis)
    p = combine(x[:k], [dec.domain_basis[c] for c in dec.range_pivots])
    coords = x[k:]
    return RangeSolution(p, combine(coords, dec.corange_basis), coords)


def is_complement(dec: OperatorDecomposition, span: list[SparsePolynomial]) -> bool:
    """True when ``span`` is a complement of the range: right size and independent of it."""
    exps = dec.codomain_exponents
    n = len(exps)
    vecs = [coordinates(b, exps) for b in dec.range_basis] + [coordinates(s, exps) for s in span]
    nonzero = [s for s in span if s]
    return (len(nonzero) == n - dec.rank
            and (n == 0 or linalg.rank(linalg.columns_to_rows(vecs, n)) == n))


def range_contains(dec: OperatorDecomposition, f: SparsePolynomial) -> bool:
    exps = dec.codomain_exponents
    n = len(exps)
    vecs = [coordinates(b, exps) for b in dec.range_basis]
    if not f:
        return True
    base = linalg.rank(linalg.columns_to_rows(vecs, n)) if vecs else 0
    return linalg.rank(linalg.columns_to_rows(vecs + [coordinates(f, exps)], n)) == base
