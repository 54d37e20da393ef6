"""Prequantization toolkit: symplectic mechanics on R^2n, prequantum operators,
Cech integrality of [omega] and line bundles from transition functions."""

from . import bundle, cech, expr, forms, prequant, symplectic
from .expr import parse
from .prequant import ConnectionPotential, PrequantOperator, dirac_check
from .symplectic import CanonicalChart, hamiltonian_vector_field, integrate_flow, poisson_bracket

__version__ = "0.1.0"
