"""
Grids, domains, node fields, quadrature and sublevel-set projection.
"""

from .grid import Grid2D, build_grid
from .domain import (
    BoundarySamples,
    DomainSpec,
    Disk,
    Rectangle,
    Ellipse,
    Stadium,
    Polygon,
    DomainMask,
    make_domain,
    rasterize_domain,
)
from .fields import ScalarField, gradient, gradient_norm, interpolate, laplacian_5pt
from .quadrature import ball_admissible, disk_integral, circle_integral, sample_circle
from .quantile import weighted_quantile, quantile_weights

__all__ = [
    "Grid2D",
    "build_grid",
    "BoundarySamples",
    "DomainSpec",
    "Disk",
    "Rectangle",
    "Ellipse",
    "Stadium",
    "Polygon",
    "DomainMask",
    "make_domain",
    "rasterize_domain",
    "ScalarField",
    "gradient",
    "gradient_norm",
    "interpolate",
    "laplacian_5pt",
    "ball_admissible",
    "disk_integral",
    "circle_integral",
    "sample_circle",
    "weighted_quantile",
    "quantile_weights",
]
