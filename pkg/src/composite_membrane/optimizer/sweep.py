"""
Lambda(A) sweeps and the shape-derivative identity dLambda/dA = alpha c^2.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Union

from tqdm import tqdm

from ..config import get_settings
from ..exceptions import InvalidInputError, MembraneError
from ..geometry import DomainMask, DomainSpec, Grid2D, rasterize_domain
from ..geometry.quantile import quantile_weights
from ..utils.data_utils import calculate_statistics
from .models import CurveSample, InitKind, LambdaCurve, OptimalPair
from .optimizer import optimize

logger = logging.getLogger(__name__)


def _sample_from_pair(pair: OptimalPair) -> CurveSample:
    return CurveSample(
        A=pair.A,
        lam=pair.lam,
        c=pair.c,
        iterations=pair.iterations,
        converged=pair.converged,
        subcritical=pair.subcritical,
        max_u=float(pair.u.values.max()),
    )


def _failed_sample(A: float, error: Exception) -> CurveSample:
    return CurveSample(A=A, lam=math.nan, c=math.nan, iterations=0, converged=False,
                       subcritical=False, error=str(error))


def sweep(
    spec: DomainSpec,
    grid: Grid2D,
    alpha: float,
    A_list: Sequence[float],
    init: Union[InitKind, str] = InitKind.ANNULUS,
    warm_start: bool = True,
    threads: Optional[int] = None,
    seed: int = 0,
    on_pair: Optional[Callable[[OptimalPair], None]] = None,
    progress: bool = False,
    **optimize_kwargs,
) -> LambdaCurve:
    """
    One optimal pair per measure in ``A_list``.

    With ``warm_start`` the samples run in order and each starts from the
    sublevel set of the previous eigenfunction at the new measure; otherwise
    they are independent and dispatched to a thread pool. Failures are
    recorded on the sample and the sweep continues.
    """
    A_list = [float(a) for a in A_list]
    if not A_list:
        raise InvalidInputError("A_list is empty")
    if any(b <= a for a, b in zip(A_list, A_list[1:])):
        raise InvalidInputError("A_list must be strictly increasing")
    omega = rasterize_domain(spec, grid)
    if A_list[0] <= 0 or A_list[-1] >= omega.measure:
        raise InvalidInputError(f"A_list must lie inside (0, {omega.measure!r})")
    threads = threads or get_settings().threads
    curve = LambdaCurve(alpha=float(alpha))

    if warm_start:
        previous: Optional[OptimalPair] = None
        for A in tqdm(A_list, desc="sweep", disable=not progress):
            try:
                D0 = start = None
                if previous is not None:
                    _, admitted = quantile_weights(previous.u.values, omega.weights, A)
                    D0 = DomainMask(grid, admitted > 0, admitted)
                    start = previous.u
                pair = optimize(spec, grid, alpha, A, init=init, seed=seed, D0=D0,
                                omega=omega, start=start, **optimize_kwargs)
            except MembraneError as e:
                logger.warning("sweep sample A=%g failed: %s", A, e)
                curve.samples.append(_failed_sample(A, e))
                continue
            previous = pair
            curve.samples.append(_sample_from_pair(pair))
            if on_pair is not None:
                on_pair(pair)
    else:
        def run(A: float):
            try:
                return optimize(spec, grid, alpha, A, init=init, seed=seed, omega=omega, **optimize_kwargs)
            except MembraneError as e:
                return e

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(tqdm(pool.map(run, A_list), total=len(A_list), desc="sweep", disable=not progress))
        for A, result in zip(A_list, results):
            if isinstance(result, Exception):
                logger.warning("sweep sample A=%g failed: %s", A, result)
                curve.samples.append(_failed_sample(A, result))
                continue
            curve.samples.append(_sample_from_pair(result))
            if on_pair is not None:
                on_pair(result)

    checks = curve.checks()
    if not checks["strictly_increasing"]:
        logger.warning("Lambda(A) is not strictly increasing on this sweep")
    if not checks["lipschitz_ok"]:
        logger.warning("Lambda(A) exceeds the Lipschitz bound alpha * max(u)^2")
    return curve


@dataclass
class ShapeDerivativeReport:
    """Relative residuals ``|dLambda/dA - alpha c^2| / (alpha c^2)`` at interior samples."""
    A: List[float] = field(default_factory=list)
    slope: List[float] = field(default_factory=list)
    predicted: List[float] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)
    skipped: List[float] = field(default_factory=list)

    @property
    def statistics(self) -> Dict[str, Optional[float]]:
        return calculate_statistics(self.residuals)

    @property
    def median(self) -> float:
        stats = self.statistics
        return math.nan if stats["median"] is None else stats["median"]

    @property
    def maximum(self) -> float:
        stats = self.statistics
        return math.nan if stats["max"] is None else stats["max"]

    def to_rows(self) -> List[Dict[str, float]]:
        return [
            {"A": a, "dLambda_dA": s, "alpha_c2": p, "residual": r}
            for a, s, p, r in zip(self.A, self.slope, self.predicted, self.residuals)
        ]


def central_slope(A: Sequence[float], lam: Sequence[float], i: int) -> float:
    """Second-order three-point derivative at ``A[i]`` on a non-uniform grid."""
    h1 = A[i] - A[i - 1]
    h2 = A[i + 1] - A[i]
    return (
        -h2 / (h1 * (h1 + h2)) * lam[i - 1]
        + (h2 - h1) / (h1 * h2) * lam[i]
        + h1 / (h2 * (h1 + h2)) * lam[i + 1]
    )


def shape_derivative_residual(curve: LambdaCurve, alpha: Optional[float] = None) -> ShapeDerivativeReport:
    """
    Compare the central-difference slope of Lambda(A) with ``alpha c^2``.

    Samples with ``c == 0`` are skipped with a warning; samples at kinks of
    Lambda(A) are reported as they are.
    """
    alpha = curve.alpha if alpha is None else alpha
    pts = curve.valid
    if len(pts) < 3:
        raise InvalidInputError(f"need at least 3 valid samples, got {len(pts)}")
    A = [p.A for p in pts]
    lam = [p.lam for p in pts]
    report = ShapeDerivativeReport()
    for i in range(1, len(pts) - 1):
        predicted = alpha * pts[i].c ** 2
        if predicted == 0:
            logger.warning("skipping A=%g: alpha c^2 = 0", A[i])
            report.skipped.append(A[i])
            continue
        slope = central_slope(A, lam, i)
        report.A.append(A[i])
        report.slope.append(slope)
        report.predicted.append(predicted)
        report.residuals.append(abs(slope - predicted) / predicted)
    stats = report.statistics
    if stats["count"]:
        logger.info("shape derivative residual: median %.3e, max %.3e over %d samples",
                    stats["median"], stats["max"], stats["count"])
    return report
