"""
Scalar node fields and their discrete derivatives.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import ndimage

from ..config import get_settings
from ..exceptions import InvalidInputError
from .domain import DomainMask
from .grid import Grid2D


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real node values on ``mask.grid``; nodes outside ``mask.inside`` hold 0."""

    mask: DomainMask
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.mask.grid.shape:
            raise InvalidInputError(
                f"field shape {values.shape} does not match grid shape {self.mask.grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("field values must be finite")
        object.__setattr__(self, "values", np.where(self.mask.inside, values, 0.0))

    @property
    def grid(self) -> Grid2D:
        return self.mask.grid

    @classmethod
    def from_function(cls, mask: DomainMask, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "ScalarField":
        X, Y = mask.grid.coords
        return cls(mask, np.broadcast_to(fn(X, Y), mask.grid.shape))

    def with_values(self, values: np.ndarray) -> "ScalarField":
        return ScalarField(self.mask, values)

    def inside_values(self) -> np.ndarray:
        return self.values[self.mask.inside]

    @cached_property
    def _spline_coefficients(self) -> np.ndarray:
        return ndimage.spline_filter(self.values, order=3, mode="nearest")

    def sample(self, points: np.ndarray, order: Optional[int] = None) -> np.ndarray:
        """Interpolate at ``(m, 2)`` points (order 1 bilinear, order 3 cubic spline)."""
        return interpolate(self, points, order=order)


def interpolate(field: ScalarField, points: np.ndarray, order: Optional[int] = None) -> np.ndarray:
    """Interpolate a field at arbitrary points; outside the bbox the nearest edge value is used."""
    order = get_settings().interp_order if order is None else order
    coords = field.grid.to_index(points)
    if order == 3:
        return ndimage.map_coordinates(
            field._spline_coefficients, coords, order=3, mode="nearest", prefilter=False
        )
    return ndimage.map_coordinates(field.values, coords, order=order, mode="nearest")


def _axis_derivative(values: np.ndarray, inside: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Central differences where both neighbours are inside, one-sided otherwise."""
    v = np.moveaxis(values, axis, 0)
    m = np.moveaxis(inside, axis, 0)
    d = np.zeros_like(v)
    n = v.shape[0]

    prev_in = np.zeros_like(m)
    next_in = np.zeros_like(m)
    prev_in[1:] = m[:-1]
    next_in[:-1] = m[1:]
    prev2_in = np.zeros_like(m)
    next2_in = np.zeros_like(m)
    prev2_in[2:] = m[:-2]
    next2_in[:-2] = m[2:]

    vp = np.zeros_like(v)
    vn = np.zeros_like(v)
    vp2 = np.zeros_like(v)
    vn2 = np.zeros_like(v)
    vp[1:] = v[:-1]
    vn[:-1] = v[1:]
    vp2[2:] = v[:-2]
    vn2[:-2] = v[2:]

    central = m & prev_in & next_in
    forward2 = m & ~central & next_in & next2_in
    backward2 = m & ~central & ~forward2 & prev_in & prev2_in
    forward1 = m & ~central & ~forward2 & ~backward2 & next_in
    backward1 = m & ~central & ~forward2 & ~backward2 & ~forward1 & prev_in

    d = np.where(central, (vn - vp) / (2 * h), d)
    d = np.where(forward2, (-3 * v + 4 * vn - vn2) / (2 * h), d)
    d = np.where(backward2, (3 * v - 4 * vp + vp2) / (2 * h), d)
    d = np.where(forward1, (vn - v) / h, d)
    d = np.where(backward1, (v - vp) / h, d)
    if n < 2:
        d[:] = 0.0
    return np.moveaxis(d, 0, axis)


def gradient(field: ScalarField) -> Tuple[ScalarField, ScalarField]:
    """
    Discrete gradient ``(d/dx1, d/dx2)`` on the mask.

    Second-order central differences at nodes whose neighbours are inside,
    second-order one-sided differences at the mask boundary.
    """
    inside = field.mask.inside
    gx = _axis_derivative(field.values, inside, field.grid.hx, axis=1)
    gy = _axis_derivative(field.values, inside, field.grid.hy, axis=0)
    return field.with_values(gx), field.with_values(gy)


def gradient_norm(field: ScalarField) -> ScalarField:
    gx, gy = gradient(field)
    return field.with_values(np.hypot(gx.values, gy.values))


def laplacian_5pt(values: np.ndarray, grid: Grid2D) -> np.ndarray:
    """Plain 5-point Laplacian at interior grid nodes; edge rows are NaN."""
    lap = np.full(values.shape, np.nan)
    c = values[1:-1, 1:-1]
    lap[1:-1, 1:-1] = (
        (values[1:-1, 2:] - 2 * c + values[1:-1, :-2]) / grid.hx ** 2
        + (values[2:, 1:-1] - 2 * c + values[:-2, 1:-1]) / grid.hy ** 2
    )
    return lap
