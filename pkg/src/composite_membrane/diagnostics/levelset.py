"""
Thin level sets and the gradient along the free boundary.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ..config import get_settings
from ..exceptions import InvalidInputError
from ..freeboundary import Contour, extract_contour, field_gradient_max
from ..geometry import ScalarField
from ..optimizer.models import OptimalPair

logger = logging.getLogger(__name__)

CELL_SUBSAMPLES = 8


@dataclass
class LevelSetReport:
    level: float
    eps: List[float]
    measures: List[float]
    region_measure: float

    @property
    def relative(self) -> List[float]:
        return [m / self.region_measure for m in self.measures]

    @property
    def slope(self) -> float:
        """Least-squares ``K`` in ``measure / |region| ~ K eps`` (line through the origin)."""
        eps = np.asarray(self.eps)
        return float(np.dot(eps, self.relative) / np.dot(eps, eps))

    def monotone(self) -> bool:
        """Measures do not increase as eps decreases."""
        return all(b <= a for a, b in zip(self.measures, self.measures[1:]))


def _cell_corners(u: ScalarField):
    v = u.values
    valid = u.mask.weights > 0
    cells = valid[:-1, :-1] & valid[:-1, 1:] & valid[1:, :-1] & valid[1:, 1:]
    return cells, v[:-1, :-1], v[:-1, 1:], v[1:, :-1], v[1:, 1:]


def levelset_thickness(
    u: ScalarField, s: float, eps_list: Sequence[float], subsamples: int = CELL_SUBSAMPLES
) -> LevelSetReport:
    """
    Measure of ``{|u - s| < eps}`` for each ``eps``, by bilinear reconstruction
    on ``subsamples^2`` points per cell over cells with four supported corners.
    """
    eps = [float(e) for e in eps_list]
    if not eps or min(eps) <= 0:
        raise InvalidInputError("eps values must be positive")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise InvalidInputError("eps values must be strictly decreasing")

    grid = u.grid
    cells, v00, v01, v10, v11 = _cell_corners(u)
    if not cells.any():
        raise InvalidInputError("no cell has four supported corners")
    offsets = (np.arange(subsamples) + 0.5) / subsamples
    counts = np.zeros(len(eps))
    for ty in offsets:
        for tx in offsets:
            value = ((1 - ty) * ((1 - tx) * v00 + tx * v01) + ty * ((1 - tx) * v10 + tx * v11))[cells]
            gap = np.abs(value - s)
            for k, e in enumerate(eps):
                counts[k] += np.count_nonzero(gap < e)
    sub_area = grid.cell_area / subsamples ** 2
    measures = [float(c * sub_area) for c in counts]
    report = LevelSetReport(float(s), eps, measures, float(cells.sum() * grid.cell_area))
    logger.debug("level %.6g: measures %s", s, measures)
    return report


@dataclass
class BoundaryGradient:
    """``|grad u|`` sampled along ``{u = level}``."""
    contour: Contour
    max_grad: float
    min_grad: float
    singular_fraction: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.max_grad > self.threshold

    @property
    def variation(self) -> float:
        """``(max - min) / max`` along the contour."""
        return (self.max_grad - self.min_grad) / self.max_grad if self.max_grad > 0 else 0.0


def gradient_on_contour(field: ScalarField, level: float, tau: Optional[float] = None) -> BoundaryGradient:
    tau = get_settings().tau if tau is None else tau
    if not tau > 0:
        raise InvalidInputError(f"tau must be > 0, got {tau}")
    contour = extract_contour(field, level)
    threshold = tau * field_gradient_max(field)
    g = contour.grad_norm
    return BoundaryGradient(
        contour=contour,
        max_grad=float(g.max()),
        min_grad=float(g.min()),
        singular_fraction=float(np.mean(g < threshold)),
        threshold=threshold,
    )


def gradient_on_boundary(pair: OptimalPair, tau: Optional[float] = None) -> BoundaryGradient:
    """Gradient of ``u`` along the free boundary ``{u = c}`` of a solved pair."""
    result = gradient_on_contour(pair.u, pair.c, tau)
    logger.info("|grad u| on F: max %.6g, min %.6g, singular fraction %.3g",
                result.max_grad, result.min_grad, result.singular_fraction)
    return result
