"""Orbital normal forms, algebraic inverse integrating factors and the center problem
for planar systems with a quasi-homogeneous Hamiltonian leading part."""

__version__ = "0.1.0"

from .iifcheck import IifCandidate, verify_polynomial_iif, verify_power_iif
from .nform import classify_aiif, normal_form, second_stage
from .qhgrade import QHType, basis, index_set_complement
from .ratpoly import PlanarField, SparsePolynomial, X, Y
from .structure import check_hypotheses, is_monodromic

__all__ = [
    "IifCandidate",
    "PlanarField",
    "QHType",
    "SparsePolynomial",
    "X",
    "Y",
    "basis",
    "check_hypotheses",
    "classify_aiif",
    "index_set_complement",
    "is_monodromic",
    "normal_form",
    "second_stage",
    "verify_polynomial_iif",
    "verify_power_iif",
]
