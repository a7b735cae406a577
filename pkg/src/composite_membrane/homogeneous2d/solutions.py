"""
Exact degree-2 homogeneous solutions of Laplace v = f0 chi_{v>=0} - g0 chi_{v<0} in the plane.

Every solution is ``v(x) = |x|^2 w(theta)`` for an angular profile ``w``.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence

import numpy as np

from ..exceptions import InvalidInputError
from ..freeboundary import TwoPhaseField, WeissMode, near_sign_change, weiss_energy
from ..geometry import DomainMask, Grid2D, ScalarField, build_grid, laplacian_5pt

logger = logging.getLogger(__name__)

THREEFOLD = 2.0 * math.pi / 3.0

_TEXT_KEYS = ("kind", "f0", "g0", "a", "C+", "D+", "C-", "D-", "gamma", "mu", "theta0")


class SolutionKind(Enum):
    HALFPLANE = "halfplane"
    NONNEGATIVE = "nonnegative"
    BLANK = "blank"


@dataclass(frozen=True)
class HomogeneousSolution2D:
    """
    Parameters of one exact solution.

    ``a`` is used by the nonnegative family only; ``C_plus`` to ``theta0`` by
    the two-phase profile, whose angular pieces on ``[0, 2pi/3)`` are
    ``C+ sin(2t + D+) + gamma`` on ``[0, theta0]`` and ``C- sin(2t + D-) + mu``
    on ``(theta0, 2pi/3)``, repeated with period ``2pi/3``.
    """

    kind: SolutionKind
    f0: float
    g0: float
    a: float = math.nan
    C_plus: float = math.nan
    D_plus: float = math.nan
    C_minus: float = math.nan
    D_minus: float = math.nan
    gamma: float = math.nan
    mu: float = math.nan
    theta0: float = math.nan
    checks: Dict[str, float] = field(default_factory=dict, compare=False)

    def angular(self, theta: np.ndarray) -> np.ndarray:
        """The profile ``w(theta)``."""
        theta = np.asarray(theta, dtype=float)
        if self.kind is SolutionKind.HALFPLANE:
            return 0.5 * self.f0 * np.cos(theta) ** 2
        if self.kind is SolutionKind.NONNEGATIVE:
            q = 0.25 * self.f0
            return (self.a + q) * np.cos(theta) ** 2 + (q - self.a) * np.sin(theta) ** 2
        phi = np.mod(theta, THREEFOLD)
        positive = self.C_plus * np.sin(2 * phi + self.D_plus) + self.gamma
        negative = self.C_minus * np.sin(2 * phi + self.D_minus) + self.mu
        return np.where(phi <= self.theta0, positive, negative)

    def __call__(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return (x * x + y * y) * self.angular(np.arctan2(y, x))

    def to_text(self) -> str:
        """Flat ``key = value`` block."""
        values = {
            "kind": self.kind.value, "f0": self.f0, "g0": self.g0, "a": self.a,
            "C+": self.C_plus, "D+": self.D_plus, "C-": self.C_minus, "D-": self.D_minus,
            "gamma": self.gamma, "mu": self.mu, "theta0": self.theta0,
        }
        lines = [f"kind = {values['kind']}"]
        lines += [f"{key} = {float(values[key])!r}" for key in _TEXT_KEYS[1:]]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "HomogeneousSolution2D":
        entries = {}
        for raw in text.splitlines():
            if "=" not in raw:
                continue
            key, value = (part.strip() for part in raw.split("=", 1))
            entries[key] = value
        missing = [k for k in _TEXT_KEYS if k not in entries]
        if missing:
            raise InvalidInputError(f"solution block misses {', '.join(missing)}")
        num = {k: float(entries[k]) for k in _TEXT_KEYS[1:]}
        return cls(
            kind=SolutionKind(entries["kind"]), f0=num["f0"], g0=num["g0"], a=num["a"],
            C_plus=num["C+"], D_plus=num["D+"], C_minus=num["C-"], D_minus=num["D-"],
            gamma=num["gamma"], mu=num["mu"], theta0=num["theta0"],
        )


def _check_coefficients(f0: float, g0: float) -> None:
    if not f0 > 0:
        raise InvalidInputError(f"f0 must be > 0, got {f0}")
    if not g0 < 0:
        raise InvalidInputError(f"g0 must be < 0, got {g0}")
    if not f0 + g0 < 0:
        raise InvalidInputError(f"f0 + g0 must be < 0, got {f0 + g0}")


def halfplane(f0: float, g0: Optional[float] = None) -> HomogeneousSolution2D:
    """``v = (f0/2) x1^2``; ``g0`` is irrelevant to ``v`` and defaults to ``-2 f0``."""
    if not f0 > 0:
        raise InvalidInputError(f"f0 must be > 0, got {f0}")
    g0 = -2.0 * f0 if g0 is None else g0
    _check_coefficients(f0, g0)
    return HomogeneousSolution2D(SolutionKind.HALFPLANE, float(f0), float(g0))


def nonnegative(f0: float, a: float, g0: Optional[float] = None) -> HomogeneousSolution2D:
    """``v = (a + f0/4) x1^2 + (f0/4 - a) x2^2`` with ``|a| <= f0/4``."""
    if not f0 > 0:
        raise InvalidInputError(f"f0 must be > 0, got {f0}")
    if not -0.25 * f0 <= a <= 0.25 * f0:
        raise InvalidInputError(f"a must lie in [-f0/4, f0/4] = [{-0.25 * f0}, {0.25 * f0}], got {a}")
    g0 = -2.0 * f0 if g0 is None else g0
    _check_coefficients(f0, g0)
    return HomogeneousSolution2D(SolutionKind.NONNEGATIVE, float(f0), float(g0), a=float(a))


def evaluate(sol: HomogeneousSolution2D, points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    return sol(points[:, 0], points[:, 1])


def evaluate_field(sol: HomogeneousSolution2D, grid: Grid2D) -> ScalarField:
    """``v`` at every node of ``grid``."""
    return ScalarField.from_function(DomainMask.full(grid), sol)


def pde_residual(sol: HomogeneousSolution2D, grid: Grid2D, band_cells: int = 2) -> float:
    """
    ``max |Laplace_h v - (f0 chi_{v>=0} - g0 chi_{v<0})|`` at interior nodes,
    skipping a ``band_cells`` band around the sign change of ``v``.
    """
    v = sol(*grid.coords)
    lap = laplacian_5pt(v, grid)
    rhs = np.where(v >= 0, sol.f0, -sol.g0)
    valid = ~np.isnan(lap) & ~near_sign_change(v, band_cells)
    if not valid.any():
        raise InvalidInputError("no interior nodes off the sign-change band")
    return float(np.abs(lap - rhs)[valid].max())


def exact_grid(radii: Sequence[float], n: int = 512) -> Grid2D:
    """Square grid around the origin covering ``1.2 * max(radii)``."""
    half = 1.2 * max(radii)
    return build_grid((-half, half, -half, half), n, n)


def weiss_values(sol: HomogeneousSolution2D, radii: Sequence[float], n: int = 512) -> np.ndarray:
    """Frozen-coefficient Weiss energy of ``sol`` at the origin for each radius."""
    radii = [float(r) for r in radii]
    if not radii or min(radii) <= 0:
        raise InvalidInputError("radii must be positive")
    grid = exact_grid(radii, n)
    tp = TwoPhaseField.synthetic(evaluate_field(sol, grid), sol.f0, sol.g0)
    return np.array([weiss_energy(tp, (0.0, 0.0), r, WeissMode.FROZEN) for r in radii])


def relative_spread(values: Sequence[float]) -> float:
    """``(max - min) / |mean|``; the plain range when the mean vanishes."""
    values = np.asarray(values, dtype=float)
    mean = abs(float(values.mean()))
    spread = float(np.ptp(values))
    return spread / mean if mean > 0 else spread


def weiss_constancy(sol: HomogeneousSolution2D, radii: Sequence[float], n: int = 512) -> float:
    """Relative spread of the frozen Weiss energy over ``radii``."""
    W = weiss_values(sol, radii, n)
    result = relative_spread(W)
    logger.info("%s solution: W in [%.8g, %.8g], relative spread %.3e", sol.kind.value, W.min(), W.max(), result)
    return result
