"""
Composite Membrane Package

Numerical toolkit for the composite membrane eigenvalue problem: optimal
configurations, their two-phase free-boundary form and the checks run on them.

Modules:
- geometry: Grids, domains, node fields and quadrature
- spectral: Ground states of -Laplace + alpha * chi_D
- optimizer: Rearrangement fixed point, alpha sweeps and pair storage
- freeboundary: Two-phase fields, contours, Weiss energy and blow-ups
- homogeneous2d: Exact degree-2 homogeneous solutions
- diagnostics: Pohozaev identity, weak uniqueness and level-set checks
- utils: Common utilities and helpers
- config: Configuration management
"""

__version__ = "1.0.0"
__author__ = "Composite Membrane Team"

from .exceptions import (
    ConfigError,
    ConvergenceError,
    ExtractionError,
    InvalidInputError,
    MembraneError,
    NoProfileError,
)
from .optimizer import OptimalPair, optimize, sweep
from .freeboundary import blowup, to_two_phase, weiss_profile
from .homogeneous2d import blank_profile
from .diagnostics import run_all

__all__ = [
    "MembraneError",
    "InvalidInputError",
    "ConfigError",
    "ConvergenceError",
    "ExtractionError",
    "NoProfileError",
    "OptimalPair",
    "optimize",
    "sweep",
    "to_two_phase",
    "weiss_profile",
    "blowup",
    "blank_profile",
    "run_all",
]
