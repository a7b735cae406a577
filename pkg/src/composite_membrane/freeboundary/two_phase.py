"""
Two-phase form of an optimal pair: v = c - u with f = (Lambda - alpha) u and g = -Lambda u.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy import ndimage

from ..config import get_settings
from ..exceptions import InvalidInputError
from ..geometry import DomainMask, Grid2D, ScalarField, gradient, interpolate, laplacian_5pt
from ..optimizer.models import OptimalPair

logger = logging.getLogger(__name__)

Coefficient = Union[float, ScalarField, Callable[[np.ndarray, np.ndarray], np.ndarray]]


class Provenance(Enum):
    """Where a two-phase field came from."""
    PAIR = "pair"
    SYNTHETIC = "synthetic"


def near_sign_change(values: np.ndarray, cells: int) -> np.ndarray:
    """Nodes within ``cells`` grid steps (Chebyshev) of a node of the other phase."""
    phase = (values >= 0).astype(np.int8)
    size = 2 * cells + 1
    return ndimage.maximum_filter(phase, size=size) != ndimage.minimum_filter(phase, size=size)


def stencil_inside(mask: DomainMask) -> np.ndarray:
    """Inside nodes whose four neighbours are inside as well."""
    m = mask.inside
    ok = np.zeros_like(m)
    ok[1:-1, 1:-1] = m[1:-1, 1:-1] & m[:-2, 1:-1] & m[2:, 1:-1] & m[1:-1, :-2] & m[1:-1, 2:]
    return ok


@dataclass(frozen=True, eq=False)
class TwoPhaseField:
    """
    ``Laplace v = f chi_{v>=0} - g chi_{v<0}`` data on one grid.

    ``f0``/``g0`` are set when the coefficients are constants.
    """

    v: ScalarField
    f: ScalarField
    g: ScalarField
    provenance: Provenance
    f0: Optional[float] = None
    g0: Optional[float] = None
    band_width: float = 0.0
    equation_residual: float = math.nan

    @property
    def grid(self) -> Grid2D:
        return self.v.grid

    @property
    def mask(self) -> DomainMask:
        return self.v.mask

    @cached_property
    def grad_v(self) -> Tuple[np.ndarray, np.ndarray]:
        gx, gy = gradient(self.v)
        return gx.values, gy.values

    @cached_property
    def grad_f(self) -> Tuple[np.ndarray, np.ndarray]:
        if self.f0 is not None:
            return np.zeros(self.grid.shape), np.zeros(self.grid.shape)
        gx, gy = gradient(self.f)
        return gx.values, gy.values

    @cached_property
    def grad_g(self) -> Tuple[np.ndarray, np.ndarray]:
        if self.g0 is not None:
            return np.zeros(self.grid.shape), np.zeros(self.grid.shape)
        gx, gy = gradient(self.g)
        return gx.values, gy.values

    @cached_property
    def grad_v_max(self) -> float:
        gx, gy = self.grad_v
        return float(np.hypot(gx, gy)[self.mask.inside].max())

    def grad_v_at(self, points: np.ndarray) -> np.ndarray:
        gx, gy = self.grad_v
        px = interpolate(self.v.with_values(gx), points, order=1)
        py = interpolate(self.v.with_values(gy), points, order=1)
        return np.hypot(px, py)

    def coefficients_at(self, x0) -> Tuple[float, float]:
        """``(f(x0), g(x0))`` for the frozen-coefficient energy."""
        if self.f0 is not None and self.g0 is not None:
            return self.f0, self.g0
        point = np.asarray([x0], dtype=float)
        f_val = self.f0 if self.f0 is not None else float(interpolate(self.f, point, order=1)[0])
        g_val = self.g0 if self.g0 is not None else float(interpolate(self.g, point, order=1)[0])
        return f_val, g_val

    def band(self, width: Optional[float] = None) -> np.ndarray:
        width = self.band_width if width is None else width
        return self.mask.inside & (np.abs(self.v.values) < width)

    @property
    def eta0(self) -> float:
        """``min(f, -g)`` over the band (or of the constants): the admissibility margin."""
        if self.f0 is not None and self.g0 is not None:
            return min(self.f0, -self.g0)
        band = self.band()
        if not band.any():
            band = self.mask.inside
        return float(min(self.f.values[band].min(), -self.g.values[band].max()))

    @classmethod
    def synthetic(
        cls,
        v: ScalarField,
        f: Coefficient,
        g: Coefficient,
    ) -> "TwoPhaseField":
        """Wrap a prescribed ``v`` with constant, field or callable coefficients."""
        f_field, f0 = _coefficient_field(v, f)
        g_field, g0 = _coefficient_field(v, g)
        return cls(v, f_field, g_field, Provenance.SYNTHETIC, f0=f0, g0=g0)

    @classmethod
    def from_functions(
        cls,
        grid: Grid2D,
        v: Callable[[np.ndarray, np.ndarray], np.ndarray],
        f: Coefficient,
        g: Coefficient,
    ) -> "TwoPhaseField":
        """Sample ``v`` on every node of ``grid``."""
        v_field = ScalarField.from_function(DomainMask.full(grid), v)
        return cls.synthetic(v_field, f, g)


def _coefficient_field(v: ScalarField, value: Coefficient) -> Tuple[ScalarField, Optional[float]]:
    if isinstance(value, ScalarField):
        return value, None
    if callable(value):
        return ScalarField.from_function(v.mask, value), None
    const = float(value)
    return v.with_values(np.full(v.grid.shape, const)), const


def equation_residual(tp: TwoPhaseField, band_cells: int = 2) -> float:
    """``max |Laplace_h v - (f chi_{v>=0} - g chi_{v<0})|`` off a band around the sign change."""
    lap = laplacian_5pt(tp.v.values, tp.grid)
    rhs = np.where(tp.v.values >= 0, tp.f.values, -tp.g.values)
    valid = stencil_inside(tp.mask) & ~near_sign_change(tp.v.values, band_cells)
    if not valid.any():
        return math.nan
    return float(np.abs(lap - rhs)[valid].max())


def subharmonicity_defect(tp: TwoPhaseField, band_cells: int = 2) -> float:
    """``max(0, -min Laplace_h v+)`` over interior nodes off the free boundary."""
    lap = laplacian_5pt(np.maximum(tp.v.values, 0.0), tp.grid)
    valid = stencil_inside(tp.mask) & ~near_sign_change(tp.v.values, band_cells)
    if not valid.any():
        return 0.0
    return float(max(0.0, -lap[valid].min()))


def _signs_hold(f: np.ndarray, g: np.ndarray, band: np.ndarray) -> bool:
    return bool(np.all(f[band] > 0) and np.all(g[band] < 0) and np.all(f[band] + g[band] < 0))


def to_two_phase(pair: OptimalPair, band_cells: Optional[int] = None) -> TwoPhaseField:
    """
    Build ``v = c - u``, ``f = (Lambda - alpha) u`` and ``g = -Lambda u`` from a solved pair.

    The sign conditions ``f > 0``, ``g < 0``, ``f + g < 0`` are verified on
    ``{|v| < band}``; on failure the band is halved once before giving up.
    """
    if not pair.subcritical:
        raise InvalidInputError(
            f"two-phase form needs alpha < Lambda (alpha={pair.alpha}, Lambda={pair.lam})"
        )
    band_cells = band_cells or get_settings().band_cells
    omega = pair.omega
    u = pair.u.values
    v = ScalarField(omega, pair.c - u)
    f = ScalarField(omega, (pair.lam - pair.alpha) * u)
    g = ScalarField(omega, -pair.lam * u)

    width = band_cells * pair.grid.h
    for attempt in range(2):
        band = omega.inside & (np.abs(v.values) < width)
        if _signs_hold(f.values, g.values, band):
            break
        if attempt == 0:
            logger.warning("sign conditions fail on a %g-wide band; halving it", width)
            width *= 0.5
    else:
        raise InvalidInputError("sign conditions f > 0, g < 0, f + g < 0 fail near the free boundary")

    tp = TwoPhaseField(v, f, g, Provenance.PAIR, band_width=width)
    residual = equation_residual(tp)
    logger.info("two-phase field: band %.4g, equation residual off F %.3e", width, residual)
    return TwoPhaseField(v, f, g, Provenance.PAIR, band_width=width, equation_residual=residual)
