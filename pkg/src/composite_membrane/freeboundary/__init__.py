"""
Two-phase form of optimal pairs: free-boundary contours, Weiss energy and blow-ups.
"""

from .two_phase import (
    Provenance,
    TwoPhaseField,
    equation_residual,
    near_sign_change,
    subharmonicity_defect,
    to_two_phase,
)
from .contour import Contour, Polyline, classify_points, extract_contour, field_gradient_max
from .weiss import (
    V_MINUS_CONVENTION,
    WeissMode,
    WeissProfile,
    error_term,
    is_nondecreasing,
    sphere_average,
    weiss_energy,
    weiss_profile,
)
from .blowup import (
    BlowupLevel,
    BlowupSequence,
    Degree2Fit,
    blowup,
    c11_proxy,
    fit_degree2,
    geometric_radii,
    is_singular_point,
    unit_ball,
)

__all__ = [
    "Provenance",
    "TwoPhaseField",
    "equation_residual",
    "near_sign_change",
    "subharmonicity_defect",
    "to_two_phase",
    "Contour",
    "Polyline",
    "classify_points",
    "extract_contour",
    "field_gradient_max",
    "V_MINUS_CONVENTION",
    "WeissMode",
    "WeissProfile",
    "error_term",
    "is_nondecreasing",
    "sphere_average",
    "weiss_energy",
    "weiss_profile",
    "BlowupLevel",
    "BlowupSequence",
    "Degree2Fit",
    "blowup",
    "c11_proxy",
    "fit_degree2",
    "geometric_radii",
    "is_singular_point",
    "unit_ball",
]
