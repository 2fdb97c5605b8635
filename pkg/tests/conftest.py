import random

import pytest
from gmpy2 import mpq
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qhflow.qhgrade import QHType, basis, qh_degree_of
from qhflow.ratpoly import PlanarField, SparsePolynomial, X, Y, hamiltonian_field

settings.register_profile("qh", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qh")

QUARTIC = (X**4 + Y**4) / 4
CUSP = X**4 / 4 - Y**3 / 3
NILPOTENT = -(X**4 / 4 + Y**2 / 2)

# (h, type) pairs satisfying H1 and H2
CATALOG = [
    (QUARTIC, QHType(1, 1)),
    (CUSP, QHType(3, 4)),
    (NILPOTENT, QHType(1, 2)),
    ((X**2 + Y**2) / 2, QHType(1, 1)),
    (Y**2 / 2 - X**3 / 3, QHType(2, 3)),
    (X**3 / 3 + X * Y**2, QHType(1, 1)),
]

TYPES = [QHType(1, 1), QHType(1, 2), QHType(2, 3), QHType(3, 4), QHType(1, 3), QHType(2, 5)]

rationals = st.builds(lambda a, b: mpq(a, b), st.integers(-12, 12), st.integers(1, 7))
nonzero_rationals = rationals.filter(bool)
exponents = st.tuples(st.integers(0, 4), st.integers(0, 4)).filter(lambda e: sum(e) <= 8)
polys = st.dictionaries(exponents, rationals, max_size=6).map(SparsePolynomial)
fields = st.builds(PlanarField, polys, polys)


def qh_poly(draw, t: QHType, k: int) -> SparsePolynomial:
    out = SparsePolynomial()
    for m in basis(t, k):
        out = out + m * draw(rationals)
    return out


@st.composite
def qh_polys(draw, types=TYPES, max_degree=8, nonzero=True):
    t = draw(st.sampled_from(types))
    degs = [k for k in range(1, max_degree + 1) if basis(t, k)]
    k = draw(st.sampled_from(degs))
    p = qh_poly(draw, t, k)
    if nonzero and not p:
        p = basis(t, k)[0]
    return t, k, p


@st.composite
def catalog_h(draw):
    return draw(st.sampled_from(CATALOG))


@st.composite
def perturbed_systems(draw, extra=3):
    """``X_h`` plus random quasi-homogeneous terms of degrees r+1 .. r+extra."""
    h, t = draw(catalog_h())
    r = qh_degree_of(h, t) - t.size
    F = hamiltonian_field(h)
    for k in range(r + 1, r + extra + 1):
        P = qh_poly(draw, t, k + t.t1)
        Q = qh_poly(draw, t, k + t.t2)
        F = F + PlanarField(P, Q)
    return h, t, r, F


@pytest.fixture
def rng():
    return random.Random(20240613)


@st.composite
def qh_fields(draw, types=TYPES, max_degree=6):
    """Random field of ``Q_k`` with ``k + |t| > 0``; returns ``(t, k, F)``."""
    t = draw(st.sampled_from(types))
    k = draw(st.integers(-min(t.t1, t.t2) + 1, max_degree))
    P = qh_poly(draw, t, k + t.t1)
    Q = qh_poly(draw, t, k + t.t2)
    return t, k, PlanarField(P, Q)
