"""
Boundary-flux identity for optimal pairs:

    1/2 * integral_{dOmega} <x - x0, nu> (du/dnu)^2 = Lambda - alpha c^2 |D^c| - alpha integral_D u^2
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..exceptions import ExtractionError
from ..geometry import DomainMask, interpolate
from ..optimizer.models import OptimalPair

logger = logging.getLogger(__name__)

MAX_DROPPED_FRACTION = 0.1
PROBE_CELLS = 2.0

Point = Tuple[float, float]


@dataclass(frozen=True)
class PohozaevResult:
    x0: Point
    lhs: float
    rhs: float
    dropped_fraction: float
    n_samples: int

    @property
    def residual(self) -> float:
        if self.rhs == 0:
            return abs(self.lhs)
        return abs(self.lhs - self.rhs) / abs(self.rhs)


def _bilinear_supported(omega: DomainMask, points: np.ndarray) -> np.ndarray:
    """True where all four bilinear stencil nodes of a point are unknowns."""
    grid = omega.grid
    idx = grid.to_index(points)
    j = np.floor(idx[0]).astype(int)
    i = np.floor(idx[1]).astype(int)
    ok = (j >= 0) & (i >= 0) & (j < grid.ny - 1) & (i < grid.nx - 1)
    jc = np.clip(j, 0, grid.ny - 2)
    ic = np.clip(i, 0, grid.nx - 2)
    inside = omega.inside
    return ok & inside[jc, ic] & inside[jc + 1, ic] & inside[jc, ic + 1] & inside[jc + 1, ic + 1]


def normal_derivative(pair: OptimalPair) -> Tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """
    Outward normal derivative of ``u`` at boundary samples.

    Uses the one-sided second-order stencil ``-(4 u(p - d nu) - u(p - 2 d nu)) / (2 d)``
    with ``u = 0`` on the boundary and ``d = 2 h``. Samples whose probes lack
    full bilinear support (corner neighbourhoods) are dropped. Returns the kept
    points, their normals, the weighted fluxes ``w * u_nu^2`` and the dropped
    share of the perimeter.
    """
    grid = pair.grid
    samples = pair.spec.boundary_samples(min(grid.hx, grid.hy))
    delta = PROBE_CELLS * grid.h
    p1 = samples.points - delta * samples.normals
    p2 = samples.points - 2 * delta * samples.normals
    keep = _bilinear_supported(pair.omega, p1) & _bilinear_supported(pair.omega, p2)
    dropped = float(samples.weights[~keep].sum() / samples.length)
    if dropped > MAX_DROPPED_FRACTION:
        raise ExtractionError(
            f"{dropped:.1%} of the boundary has no interior probe support; refine the grid"
        )
    u1 = interpolate(pair.u, p1[keep], order=1)
    u2 = interpolate(pair.u, p2[keep], order=1)
    u_nu = -(4 * u1 - u2) / (2 * delta)
    return samples.points[keep], samples.normals[keep], samples.weights[keep] * u_nu ** 2, dropped


def pohozaev_sides(pair: OptimalPair, x0: Point) -> PohozaevResult:
    points, normals, flux, dropped = normal_derivative(pair)
    lever = np.einsum("ij,ij->i", points - np.asarray(x0, dtype=float), normals)
    lhs = 0.5 * float(np.sum(lever * flux))
    rhs = pair.lam - pair.alpha * pair.c ** 2 * pair.complement_measure - pair.alpha * pair.d_integral()
    result = PohozaevResult((float(x0[0]), float(x0[1])), lhs, rhs, dropped, len(points))
    logger.debug("flux identity at %s: lhs=%.10g rhs=%.10g", result.x0, lhs, rhs)
    return result


def pohozaev_residual(pair: OptimalPair, x0: Point = (0.0, 0.0)) -> float:
    """``|LHS - RHS| / |RHS|`` of the boundary-flux identity about ``x0``."""
    return pohozaev_sides(pair, x0).residual
