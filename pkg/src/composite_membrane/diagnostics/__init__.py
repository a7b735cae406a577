"""
Global identities and experiments on solved optimal pairs.
"""

from .pohozaev import PohozaevResult, pohozaev_residual, pohozaev_sides
from .uniqueness import SeedRun, UniquenessReport, local_slope, weak_uniqueness_experiment
from .levelset import (
    BoundaryGradient,
    LevelSetReport,
    gradient_on_boundary,
    gradient_on_contour,
    levelset_thickness,
)
from .symmetry import SymmetryVerdict, symmetry_singularity_check
from .report import DiagnosticRow, run_all, write_report

__all__ = [
    "PohozaevResult",
    "pohozaev_residual",
    "pohozaev_sides",
    "SeedRun",
    "UniquenessReport",
    "local_slope",
    "weak_uniqueness_experiment",
    "BoundaryGradient",
    "LevelSetReport",
    "gradient_on_boundary",
    "gradient_on_contour",
    "levelset_thickness",
    "SymmetryVerdict",
    "symmetry_singularity_check",
    "DiagnosticRow",
    "run_all",
    "write_report",
]
