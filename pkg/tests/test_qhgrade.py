import pytest
from gmpy2 import mpq
from hypothesis import given

from qhflow.qhgrade import (
    NotHamiltonian,
    QHType,
    basis,
    decompose_field,
    dim,
    euler,
    hamiltonian_potential,
    index_set_complement,
    qh_degree,
    split_conservative_dissipative,
    suggest_types,
)
from qhflow.ratpoly import PlanarField, X, Y, hamiltonian_field

from .conftest import CUSP, QUARTIC, TYPES, qh_fields, qh_polys


@pytest.mark.parametrize("e, t, k", [((0, 2), (3, 4), 8), ((3, 0), (3, 4), 9), ((2, 2), (1, 1), 4)])
def test_qh_degree(e, t, k):
    assert qh_degree(e, QHType(*t)) == k


def test_type_validation():
    with pytest.raises(ValueError):
        QHType(2, 4)
    with pytest.raises(ValueError):
        QHType(0, 1)
    assert QHType.parse("3, 4") == QHType(3, 4)
    assert QHType(3, 4).size == 7


@pytest.mark.parametrize("t, expected", [
    ((2, 3), {1}),
    ((4, 5), {1, 2, 3, 6, 7, 11}),
    ((1, 7), set()),
    ((3, 4), {1, 2, 5}),
])
def test_index_set_complement(t, expected):
    assert index_set_complement(QHType(*t)) == expected


def test_basis_examples():
    assert basis(QHType(1, 1), 2) == [X**2, X * Y, Y**2]
    assert basis(QHType(3, 4), 5) == []
    assert basis(QHType(3, 4), 12) == [X**4, Y**3]
    assert basis(QHType(1, 2), 4) == [X**4, X**2 * Y, Y**2]


def test_decompose_field():
    t = QHType(3, 4)
    g = decompose_field(PlanarField(Y**2, X**3), t)
    assert set(g.components) == {5} and g.r == 5
    assert set(decompose_field(PlanarField(-Y**3, X**3), QHType(1, 1)).components) == {2}
    # x^2 y has weighted degree 10 = 7 + t1
    g = decompose_field(PlanarField(Y**2 + X**2 * Y, X**3), t)
    assert set(g.components) == {5, 7}
    assert g.total() == PlanarField(Y**2 + X**2 * Y, X**3)


def test_hamiltonian_potential():
    assert hamiltonian_potential(PlanarField(-Y**3, X**3), QHType(1, 1)) == QUARTIC
    assert hamiltonian_potential(PlanarField(Y**2, X**3), QHType(3, 4)) == CUSP
    with pytest.raises(NotHamiltonian) as err:
        hamiltonian_potential(PlanarField(X, Y), QHType(1, 1))
    assert err.value.residue == 1


def test_split_examples():
    t = QHType(1, 1)
    g, mu = split_conservative_dissipative(euler(t), t, 0)
    assert (g, mu) == (0, 1)
    g, mu = split_conservative_dissipative(hamiltonian_field(QUARTIC), t, 2)
    assert (g, mu) == (QUARTIC, 0)
    g, mu = split_conservative_dissipative(euler(t).scale(QUARTIC), t, 4)
    assert (g, mu) == (0, QUARTIC)


def test_suggest_types():
    assert QHType(3, 4) in suggest_types(PlanarField(Y**2, X**3 + X**2 * Y))
    assert suggest_types(PlanarField(-Y**3, X**3)) == [QHType(1, 1)]


@given(qh_polys(max_degree=8))
def test_basis_size_counts_lattice_points(data):
    t, k, _ = data
    count = sum(1 for i in range(k + 1) for j in range(k + 1) if i * t.t1 + j * t.t2 == k)
    assert dim(t, k) == count
    for m in basis(t, k):
        (e,) = m.terms
        assert qh_degree(e, t) == k


def test_complement_is_empty_for_unit_weight():
    for t2 in range(1, 9):
        assert index_set_complement(QHType(1, t2)) == set()
    for t in TYPES:
        for k in index_set_complement(t):
            assert basis(t, k) == []


@given(qh_fields())
def test_split_roundtrip(data):
    t, k, f = data
    g, mu = split_conservative_dissipative(f, t, k)
    assert hamiltonian_field(g) + euler(t).scale(mu) == f


@given(qh_polys(nonzero=True))
def test_potential_inverts_hamiltonian_field(data):
    t, k, h = data
    if k <= t.size:
        return
    assert hamiltonian_potential(hamiltonian_field(h), t, k - t.size) == h
