"""
Blow-up rescalings v_r(x) = v(x0 + r x) / r^2 on a fixed unit-ball grid, with
degree-2 fits and a regime label from the trend of T = S(r)/r^2.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import get_settings
from ..exceptions import InvalidInputError
from ..geometry import DomainMask, ScalarField, build_grid, interpolate
from .two_phase import TwoPhaseField
from .weiss import sphere_average

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["r", "T", "a11", "a12", "a22", "residual", "harmonic_defect"]

MIN_RADIUS_CELLS = 4.0

Point = Tuple[float, float]


@lru_cache(maxsize=8)
def unit_ball(n: int) -> DomainMask:
    """Nodes of an ``n x n`` grid on ``[-1, 1]^2`` with ``|x| <= 1``."""
    grid = build_grid((-1.0, 1.0, -1.0, 1.0), n, n)
    X, Y = grid.coords
    inside = np.hypot(X, Y) <= 1.0 + 1e-12
    inside[[0, -1], :] = False
    inside[:, [0, -1]] = False
    return DomainMask(grid, inside, np.where(inside, grid.cell_area, 0.0))


@dataclass(frozen=True)
class Degree2Fit:
    """Least-squares ``a11 x^2 + a12 x y + a22 y^2`` on the unit ball."""
    a11: float
    a12: float
    a22: float
    residual: float

    @property
    def coefficients(self) -> Tuple[float, float, float]:
        return self.a11, self.a12, self.a22

    @property
    def harmonic_defect(self) -> float:
        """``|a11 + a22| / (|a11| + |a12| + |a22|)``; zero iff the fit is harmonic."""
        scale = abs(self.a11) + abs(self.a12) + abs(self.a22)
        return abs(self.a11 + self.a22) / scale if scale > 0 else 0.0


def fit_degree2(field: ScalarField) -> Degree2Fit:
    inside = field.mask.inside
    X, Y = field.grid.coords
    x, y = X[inside], Y[inside]
    b = field.values[inside]
    norm = np.linalg.norm(b)
    if norm == 0:
        raise InvalidInputError("cannot fit a zero field")
    basis = np.column_stack([x * x, x * y, y * y])
    coef, *_ = np.linalg.lstsq(basis, b, rcond=None)
    residual = float(np.linalg.norm(b - basis @ coef) / norm)
    return Degree2Fit(float(coef[0]), float(coef[1]), float(coef[2]), residual)


@dataclass
class BlowupLevel:
    r: float
    T: float
    field: ScalarField
    fit: Optional[Degree2Fit]


@dataclass
class BlowupSequence:
    """Rescalings of one centre at decreasing radii."""

    center: Point
    levels: List[BlowupLevel] = field(default_factory=list)
    singular_center: bool = True

    @property
    def radii(self) -> np.ndarray:
        return np.array([lvl.r for lvl in self.levels])

    @property
    def T(self) -> np.ndarray:
        return np.array([lvl.T for lvl in self.levels])

    def trend(self) -> float:
        """Slope of ``log T`` against ``log r``; NaN when undefined."""
        T = self.T
        if len(T) < 2 or np.any(T <= 0):
            return math.nan
        slope, _ = np.polyfit(np.log(self.radii), np.log(T), 1)
        return float(slope)

    @property
    def regime(self) -> str:
        """
        ``homogeneous-solution`` for bounded T with a good degree-2 fit,
        ``harmonic-polynomial`` when T grows as r shrinks, ``degenerate`` when
        T decays to zero, ``inconclusive`` otherwise.
        """
        T = self.T
        if len(T) and np.any(T == 0):
            return "degenerate"
        p = self.trend()
        if math.isnan(p):
            return "inconclusive"
        if p > 0.5:
            return "degenerate"
        if p < -0.25:
            return "harmonic-polynomial"
        last = self.levels[-1].fit
        if abs(p) <= 0.25 and last is not None and last.residual <= 0.1:
            return "homogeneous-solution"
        return "inconclusive"

    def max_level_difference(self) -> float:
        """``max_j max|v_j - v_0| / max|v_0|`` over the unit ball."""
        if len(self.levels) < 2:
            return 0.0
        ref = self.levels[0].field.values
        scale = np.abs(ref).max()
        diff = max(float(np.abs(lvl.field.values - ref).max()) for lvl in self.levels[1:])
        return diff / scale if scale > 0 else diff

    def to_rows(self) -> List[Dict[str, float]]:
        rows = []
        for lvl in self.levels:
            fit = lvl.fit
            rows.append({
                "r": lvl.r,
                "T": lvl.T,
                "a11": fit.a11 if fit else math.nan,
                "a12": fit.a12 if fit else math.nan,
                "a22": fit.a22 if fit else math.nan,
                "residual": fit.residual if fit else math.nan,
                "harmonic_defect": fit.harmonic_defect if fit else math.nan,
            })
        return rows


def geometric_radii(r_max: float, levels: int, ratio: float = 0.5) -> List[float]:
    return [r_max * ratio ** k for k in range(levels)]


def is_singular_point(tp: TwoPhaseField, x0: Point, tau: Optional[float] = None) -> bool:
    tau = get_settings().tau if tau is None else tau
    grad = float(tp.grad_v_at(np.asarray([x0], dtype=float))[0])
    return grad < tau * tp.grad_v_max


def rescale(tp: TwoPhaseField, x0: Point, r: float, ball: DomainMask) -> ScalarField:
    """``v(x0 + r x) / r^2`` at the unit-ball nodes, bilinear in ``v``."""
    X, Y = ball.grid.coords
    inside = ball.inside
    points = np.column_stack([x0[0] + r * X[inside], x0[1] + r * Y[inside]])
    values = np.zeros(ball.grid.shape)
    values[inside] = interpolate(tp.v, points, order=1) / r ** 2
    return ScalarField(ball, values)


def blowup(
    tp: TwoPhaseField,
    x0: Point,
    r_list: Sequence[float],
    tau: Optional[float] = None,
    n: Optional[int] = None,
) -> BlowupSequence:
    """
    Rescale ``v`` around ``x0`` at each radius of ``r_list`` and fit each level.

    Radii must decrease strictly, stay at or above four grid cells and give
    admissible balls. A centre with non-vanishing gradient is accepted with a
    warning.
    """
    r_list = [float(r) for r in r_list]
    if not r_list:
        raise InvalidInputError("r_list is empty")
    if any(b >= a for a, b in zip(r_list, r_list[1:])):
        raise InvalidInputError("blow-up radii must be strictly decreasing")
    floor = MIN_RADIUS_CELLS * tp.grid.h
    if r_list[-1] < floor:
        raise InvalidInputError(f"smallest radius {r_list[-1]:.4g} is below {MIN_RADIUS_CELLS:g} cells ({floor:.4g})")
    x0 = (float(x0[0]), float(x0[1]))
    n = n or get_settings().blowup_grid
    ball = unit_ball(n)

    sequence = BlowupSequence(center=x0, singular_center=is_singular_point(tp, x0, tau))
    if not sequence.singular_center:
        logger.warning("blow-up centre (%.4g, %.4g) is not a singular point of v", *x0)

    for r in r_list:
        T = sphere_average(tp, x0, r) / r ** 2
        v_r = rescale(tp, x0, r, ball)
        fit = fit_degree2(v_r) if np.any(v_r.values) else None
        sequence.levels.append(BlowupLevel(r, T, v_r, fit))
        logger.debug("blow-up r=%.4g: T=%.6g", r, T)

    logger.info("blow-up at (%.4g, %.4g): %d levels, regime %s", x0[0], x0[1], len(r_list), sequence.regime)
    return sequence


def c11_proxy(tp: TwoPhaseField, x0: Point, r: float) -> float:
    """Finite-radius proxy ``max_{|x - x0| <= r} |v| / r^2`` over inside nodes."""
    if not r > 0:
        raise InvalidInputError(f"radius must be > 0, got {r}")
    X, Y = tp.grid.coords
    near = tp.mask.inside & (np.hypot(X - x0[0], Y - x0[1]) <= r)
    if not near.any():
        raise InvalidInputError(f"no inside nodes within {r:.4g} of {tuple(x0)}")
    return float(np.abs(tp.v.values[near]).max() / r ** 2)
