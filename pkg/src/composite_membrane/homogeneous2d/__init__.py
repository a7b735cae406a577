"""
Exact degree-2 homogeneous solutions used as oracles for the free-boundary checks.
"""

from .solutions import (
    SolutionKind,
    HomogeneousSolution2D,
    halfplane,
    nonnegative,
    evaluate,
    evaluate_field,
    pde_residual,
    exact_grid,
    weiss_values,
    relative_spread,
    weiss_constancy,
)
from .blank import EXISTENCE_RATIO, amplitudes, blank_profile, matching_residuals

__all__ = [
    "SolutionKind",
    "HomogeneousSolution2D",
    "halfplane",
    "nonnegative",
    "evaluate",
    "evaluate_field",
    "pde_residual",
    "exact_grid",
    "weiss_values",
    "relative_spread",
    "weiss_constancy",
    "EXISTENCE_RATIO",
    "amplitudes",
    "blank_profile",
    "matching_residuals",
]
