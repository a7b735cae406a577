"""
Ground states of -Laplace + alpha * chi_D with Dirichlet conditions.
"""

from .operator import SchrodingerOperator, assemble, rayleigh, dirichlet_laplacian
from .eigen import EigenPair, ground_state, l2_norm

__all__ = [
    "SchrodingerOperator",
    "assemble",
    "rayleigh",
    "dirichlet_laplacian",
    "EigenPair",
    "ground_state",
    "l2_norm",
]
