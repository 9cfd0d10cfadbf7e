"""Quantum exponential function of the az+b group at even roots of unity."""

__version__ = "0.1.0"

from .errors import ConvergenceError, DomainError
from .gamma import GammaPoint, GroupParams, classify_complex, gamma_inv, gamma_mul, to_complex
from .quadrature import QuadratureSpec
from .special import F_N, F_N_scaled, derivative_at_zero, expansion_remainder, f_o

__all__ = [
    "ConvergenceError",
    "DomainError",
    "F_N",
    "F_N_scaled",
    "GammaPoint",
    "GroupParams",
    "QuadratureSpec",
    "classify_complex",
    "derivative_at_zero",
    "expansion_remainder",
    "f_o",
    "gamma_inv",
    "gamma_mul",
    "to_complex",
]
