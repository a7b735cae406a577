"""
Weiss energy, its error term, the monotone surrogate W1 and circle averages S(r).

All formulas are for the plane: the ball term is normalized by r^4 and the
circle term by r^5.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config import get_settings
from ..exceptions import InvalidInputError
from ..geometry import ball_admissible, circle_integral, disk_integral
from .two_phase import TwoPhaseField

logger = logging.getLogger(__name__)

V_MINUS_CONVENTION = "v- = max(-v, 0); integrand |grad v|^2 + 2 (f v+ + g v-); ties v = 0 in the f phase"

CSV_COLUMNS = ["r", "W", "e", "W1", "S", "S_over_r2"]

Point = Tuple[float, float]


class WeissMode(Enum):
    """Coefficients used inside the energy."""
    VARYING = "varying"
    FROZEN = "frozen"


def _parts(tp: TwoPhaseField) -> Tuple[np.ndarray, np.ndarray]:
    v = tp.v.values
    return np.maximum(v, 0.0), np.maximum(-v, 0.0)


def weiss_integrand(tp: TwoPhaseField, x0: Point, mode: Union[WeissMode, str]) -> np.ndarray:
    gx, gy = tp.grad_v
    v_plus, v_minus = _parts(tp)
    if WeissMode(mode) is WeissMode.FROZEN:
        f, g = tp.coefficients_at(x0)
    else:
        f, g = tp.f.values, tp.g.values
    return gx ** 2 + gy ** 2 + 2.0 * (f * v_plus + g * v_minus)


def weiss_energy(
    tp: TwoPhaseField, x0: Point, r: float, mode: Union[WeissMode, str] = WeissMode.VARYING
) -> float:
    """
    ``W(r) = r^-4 * int_B (|grad v|^2 + 2(f v+ + g v-)) - 2 r^-5 * int_dB v^2``.

    In frozen mode ``f`` and ``g`` are replaced by their values at ``x0``.
    """
    bulk = disk_integral(weiss_integrand(tp, x0, mode), x0, r, mask=tp.mask)
    surface = circle_integral(tp.v, x0, r, power=2, check=False)
    return bulk / r ** 4 - 2.0 * surface / r ** 5


def error_term(tp: TwoPhaseField, x0: Point, r: float) -> float:
    """``e(r) = 2 r^-5 * int_B ((x - x0).grad f v+ + (x - x0).grad g v-)``."""
    X, Y = tp.grid.coords
    dx, dy = X - x0[0], Y - x0[1]
    fx, fy = tp.grad_f
    gx, gy = tp.grad_g
    v_plus, v_minus = _parts(tp)
    integrand = (dx * fx + dy * fy) * v_plus + (dx * gx + dy * gy) * v_minus
    if not np.any(integrand):
        _require(tp, x0, r)
        return 0.0
    return 2.0 * disk_integral(integrand, x0, r, mask=tp.mask) / r ** 5


def sphere_average(tp: TwoPhaseField, x0: Point, r: float) -> float:
    """Root mean square of ``v`` on the circle of radius ``r``."""
    _require(tp, x0, r)
    return math.sqrt(max(circle_integral(tp.v, x0, r, power=2, check=False), 0.0) / (2 * math.pi * r))


def _require(tp: TwoPhaseField, x0: Point, r: float) -> None:
    if not r > 0 or not ball_admissible(tp.mask, x0, r):
        raise InvalidInputError(f"ball B({tuple(x0)}, {r:.6g}) is not admissible")


@dataclass
class WeissProfile:
    """Sampled W, e, W1 = W + D r^gamma and S at one centre."""
    center: Point
    radii: np.ndarray
    W: np.ndarray
    e: np.ndarray
    W1: np.ndarray
    S: np.ndarray
    gamma: float
    D: float
    mode: WeissMode
    tol_W: float
    monotone: bool = False

    @property
    def S_over_r2(self) -> np.ndarray:
        return self.S / self.radii ** 2

    @property
    def s0(self) -> float:
        """Smallest sampled ``S(r)/r^2``."""
        return float(self.S_over_r2.min())

    @property
    def spread(self) -> float:
        """``(max W - min W) / |mean W|``."""
        scale = abs(float(np.mean(self.W)))
        if scale == 0:
            return float(np.ptp(self.W))
        return float(np.ptp(self.W)) / scale

    def e_bound_constant(self) -> float:
        """Smallest ``F`` with ``|e(r)| <= F r^(gamma - 1)`` on the samples."""
        return float(np.max(np.abs(self.e) * self.radii ** (1 - self.gamma)))

    def to_rows(self) -> List[Dict[str, float]]:
        return [
            {"r": r, "W": w, "e": e, "W1": w1, "S": s, "S_over_r2": s / r ** 2}
            for r, w, e, w1, s in zip(self.radii, self.W, self.e, self.W1, self.S)
        ]


def is_nondecreasing(values: Sequence[float], tol: float) -> bool:
    """Nondecreasing up to ``tol`` relative to the largest magnitude."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return True
    scale = max(float(np.max(np.abs(values))), np.finfo(float).tiny)
    return bool(np.all(np.diff(values) >= -tol * scale))


def weiss_profile(
    tp: TwoPhaseField,
    x0: Point,
    radii: Sequence[float],
    gamma: Optional[float] = None,
    D: Union[str, float] = "calibrated",
    mode: Union[WeissMode, str] = WeissMode.VARYING,
    tol_W: Optional[float] = None,
    threads: Optional[int] = None,
) -> WeissProfile:
    """
    Evaluate W, e, S on increasing ``radii`` and decide whether W1 is nondecreasing.

    ``D="calibrated"`` picks ``D = sup |e(r)| r^(1-gamma) / gamma`` so that the
    derivative of ``D r^gamma`` dominates ``|e|``.
    """
    settings = get_settings()
    gamma = settings.gamma if gamma is None else gamma
    tol_W = settings.tol_W if tol_W is None else tol_W
    threads = threads or settings.threads
    mode = WeissMode(mode)
    radii = np.asarray(radii, dtype=float)
    if not 0 <= gamma < 1:
        raise InvalidInputError(f"gamma must lie in [0, 1), got {gamma}")
    if radii.size < 1 or np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise InvalidInputError("radii must be positive and strictly increasing")
    for r in radii:
        _require(tp, x0, float(r))

    def evaluate(r: float) -> Tuple[float, float, float]:
        W = weiss_energy(tp, x0, r, mode)
        e = error_term(tp, x0, r) if mode is WeissMode.VARYING else 0.0
        return W, e, sphere_average(tp, x0, r)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(evaluate, radii))
    else:
        values = [evaluate(float(r)) for r in radii]
    W, e, S = (np.array(col) for col in zip(*values))

    if isinstance(D, str):
        if D != "calibrated":
            raise InvalidInputError(f"D must be 'calibrated' or a number, got {D!r}")
        sup = float(np.max(np.abs(e) * radii ** (1 - gamma)))
        if gamma > 0:
            D_value = sup / gamma
        else:
            if sup > 0:
                logger.warning("gamma = 0 cannot absorb a nonzero error term; using D = 0")
            D_value = 0.0
    else:
        D_value = float(D)
        if D_value < 0:
            raise InvalidInputError("D must be >= 0")

    W1 = W + D_value * radii ** gamma
    profile = WeissProfile(tuple(x0), radii, W, e, W1, S, gamma, D_value, mode, tol_W)
    profile.monotone = is_nondecreasing(W1, tol_W)
    logger.info(
        "Weiss profile at (%.4g, %.4g): D=%.4g, W1 %s, min S/r^2=%.4g",
        x0[0], x0[1], D_value, "nondecreasing" if profile.monotone else "NOT monotone", profile.s0,
    )
    return profile
