"""
Optimal configurations by the sublevel-set rearrangement fixed point.
"""

from .models import InitKind, IterationRecord, OptimalPair, CurveSample, LambdaCurve
from .optimizer import optimize, initial_set
from .sweep import sweep, shape_derivative_residual, ShapeDerivativeReport, central_slope
from .radial import RadialSolution, radial_optimize, radial_sweep
from .storage import save_pair, load_pair

__all__ = [
    "InitKind",
    "IterationRecord",
    "OptimalPair",
    "CurveSample",
    "LambdaCurve",
    "optimize",
    "initial_set",
    "sweep",
    "shape_derivative_residual",
    "ShapeDerivativeReport",
    "central_slope",
    "RadialSolution",
    "radial_optimize",
    "radial_sweep",
    "save_pair",
    "load_pair",
]
