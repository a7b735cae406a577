"""
Radial version of the optimizer on a disk, used as an independent oracle.

The disk problem reduces to a finite-volume discretization in ``r`` with
cells of exact annulus area; the same sublevel-set fixed point runs on it.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from ..config import get_settings
from ..exceptions import InvalidInputError
from ..geometry.quantile import quantile_weights
from .models import CurveSample, LambdaCurve

logger = logging.getLogger(__name__)


@dataclass
class RadialSolution:
    """Radial optimal pair: profile ``u(r_i)`` normalized so that ``sum(area_i u_i^2) = 1``."""
    radius: float
    alpha: float
    A: float
    lam: float
    c: float
    r: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    d: np.ndarray = field(repr=False)
    iterations: int = 0
    converged: bool = False

    @property
    def cut_radius(self) -> float:
        """Inner radius of the outer annulus D."""
        return math.sqrt(max(self.radius ** 2 - self.A / math.pi, 0.0))

    @property
    def max_u(self) -> float:
        return float(self.u.max())


def _radial_matrices(radius: float, n: int):
    dr = radius / n
    r = (np.arange(n) + 0.5) * dr
    area = 2 * math.pi * r * dr
    faces = np.arange(1, n) * dr
    conductance = 2 * math.pi * faces / dr
    stiff_diag = np.zeros(n)
    stiff_diag[:-1] += conductance
    stiff_diag[1:] += conductance
    stiff_diag[-1] += 2 * math.pi * radius / (0.5 * dr)
    return r, area, stiff_diag, -conductance


def radial_ground_state(radius: float, alpha: float, d: np.ndarray, n: int):
    """Lowest eigenpair of the radial operator with potential fraction ``d`` per cell."""
    r, area, stiff_diag, stiff_off = _radial_matrices(radius, n)
    scale = 1.0 / np.sqrt(area)
    diag = (stiff_diag + alpha * d * area) * scale ** 2
    off = stiff_off * scale[:-1] * scale[1:]
    w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0))
    u = v[:, 0] * scale
    if u.sum() < 0:
        u = -u
    u /= math.sqrt(float(np.sum(area * u ** 2)))
    return float(w[0]), u, r, area


def radial_optimize(
    radius: float,
    alpha: float,
    A: float,
    n: int = 4000,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> RadialSolution:
    """Optimal radial configuration on the disk of ``radius``."""
    tol = get_settings().optimizer_tol if tol is None else tol
    max_iter = get_settings().max_iter if max_iter is None else max_iter
    total = math.pi * radius ** 2
    if not 0 < A < total:
        raise InvalidInputError(f"A={A!r} must lie strictly between 0 and {total!r}")

    r, area, _, _ = _radial_matrices(radius, n)
    _, admitted = quantile_weights(-r, area, A)
    d = admitted / area
    prev = None
    lam, u, c = math.nan, None, math.nan
    converged = False
    k = 0
    for k in range(1, max_iter + 1):
        lam, u, r, area = radial_ground_state(radius, alpha, d, n)
        c, admitted = quantile_weights(u, area, A)
        d_next = admitted / area
        change = float(np.sum(np.abs(d_next - d) * area))
        if prev is not None and abs(lam - prev) < tol and change < area.max():
            converged = True
            break
        prev = lam
        d = d_next
    if not converged:
        logger.warning("radial optimizer did not converge in %d iterations", max_iter)
    return RadialSolution(radius, alpha, A, lam, c, r, u, d, k, converged)


def radial_sweep(radius: float, alpha: float, A_list: List[float], n: int = 4000) -> LambdaCurve:
    """Lambda(A) curve of the radial problem."""
    curve = LambdaCurve(alpha)
    for A in A_list:
        sol = radial_optimize(radius, alpha, A, n=n)
        curve.samples.append(CurveSample(
            A=float(A), lam=sol.lam, c=sol.c, iterations=sol.iterations,
            converged=sol.converged, subcritical=alpha < sol.lam, max_u=sol.max_u,
        ))
    return curve
