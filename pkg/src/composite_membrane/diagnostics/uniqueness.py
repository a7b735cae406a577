"""
Weak uniqueness of the cut level: optimal pairs from different random starts
should share c wherever Lambda(alpha, .) is differentiable.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from tqdm import tqdm

from ..config import get_settings
from ..exceptions import ConvergenceError, InvalidInputError, MembraneError
from ..geometry import DomainMask, DomainSpec, Grid2D, rasterize_domain
from ..geometry.quantile import quantile_weights
from ..optimizer import InitKind, OptimalPair, optimize

logger = logging.getLogger(__name__)

OPTIMAL_WINDOW = 10.0


@dataclass
class SeedRun:
    seed: int
    lam: float
    c: float
    converged: bool
    iterations: int
    error: Optional[str] = None


@dataclass
class UniquenessReport:
    """Per-seed results and the relative c spread among Lambda-optimal runs."""
    alpha: float
    A: float
    tol: float
    runs: List[SeedRun] = field(default_factory=list)
    optimal_seeds: List[int] = field(default_factory=list)
    spread: float = math.nan
    slope: Optional[float] = None
    alpha_c2: Optional[float] = None

    @property
    def c_values(self) -> List[float]:
        return [r.c for r in self.runs if r.seed in self.optimal_seeds]

    @property
    def lam_values(self) -> List[float]:
        return [r.lam for r in self.runs if r.seed in self.optimal_seeds]

    def to_rows(self) -> List[Dict[str, Any]]:
        return [
            {"seed": r.seed, "Lambda": r.lam, "c": r.c, "converged": int(r.converged),
             "optimal": int(r.seed in self.optimal_seeds)}
            for r in self.runs
        ]


def _reproject(pair: OptimalPair, A: float) -> DomainMask:
    _, admitted = quantile_weights(pair.u.values, pair.omega.weights, A)
    return DomainMask(pair.grid, admitted > 0, admitted)


def local_slope(best: OptimalPair, delta: float, **optimize_kwargs) -> float:
    """Central ``(Lambda(A + dA) - Lambda(A - dA)) / (2 dA)`` with ``dA = delta * A``, warm-started at ``best``."""
    dA = delta * best.A
    lams = []
    for A in (best.A - dA, best.A + dA):
        pair = optimize(best.spec, best.grid, best.alpha, A, omega=best.omega,
                        D0=_reproject(best, A), start=best.u, **optimize_kwargs)
        lams.append(pair.lam)
    return (lams[1] - lams[0]) / (2 * dA)


def weak_uniqueness_experiment(
    spec: DomainSpec,
    grid: Grid2D,
    alpha: float,
    A: float,
    seeds: Sequence[int],
    threads: Optional[int] = None,
    slope_probe: float = 0.0,
    progress: bool = False,
    **optimize_kwargs,
) -> UniquenessReport:
    """
    Solve from a random start per seed and compare cut levels.

    Runs within ``10 * tol`` of the smallest converged Lambda form the
    optimal set; the spread is ``(max c - min c) / mean c`` over that set.
    With ``slope_probe > 0`` the report also carries the local slope of
    Lambda(A) next to ``alpha c^2`` of the best run.
    """
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise InvalidInputError("at least one seed is required")
    if len(seeds) < 3:
        logger.warning("only %d seed(s); the c spread is not informative", len(seeds))
    omega = rasterize_domain(spec, grid)
    if not 0 < A < omega.measure:
        raise InvalidInputError(f"A={A!r} must lie strictly between 0 and |Omega|={omega.measure!r}")
    tol = optimize_kwargs.pop("tol", None)
    tol = get_settings().optimizer_tol if tol is None else tol
    threads = threads or get_settings().threads

    def run(seed: int):
        try:
            return optimize(spec, grid, alpha, A, init=InitKind.RANDOM, seed=seed, omega=omega,
                            tol=tol, **optimize_kwargs)
        except MembraneError as e:
            return e

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(tqdm(pool.map(run, seeds), total=len(seeds), desc="seeds", disable=not progress))
    else:
        results = [run(s) for s in tqdm(seeds, desc="seeds", disable=not progress)]

    report = UniquenessReport(alpha=float(alpha), A=float(A), tol=tol)
    pairs: Dict[int, OptimalPair] = {}
    for seed, result in zip(seeds, results):
        if isinstance(result, Exception):
            logger.warning("seed %d failed: %s", seed, result)
            report.runs.append(SeedRun(seed, math.nan, math.nan, False, 0, str(result)))
            continue
        pairs[seed] = result
        report.runs.append(SeedRun(seed, result.lam, result.c, result.converged, result.iterations))

    converged = [r for r in report.runs if r.converged]
    if not converged:
        raise ConvergenceError("no seed converged", iterations=max((r.iterations for r in report.runs), default=0))
    best_lam = min(r.lam for r in converged)
    report.optimal_seeds = [r.seed for r in converged if r.lam <= best_lam + OPTIMAL_WINDOW * tol]
    cs = report.c_values
    mean_c = sum(cs) / len(cs)
    report.spread = (max(cs) - min(cs)) / mean_c if mean_c > 0 else 0.0

    if slope_probe > 0:
        best_seed = min(report.optimal_seeds, key=lambda s: pairs[s].lam)
        best = pairs[best_seed]
        report.slope = local_slope(best, slope_probe, tol=tol, **optimize_kwargs)
        report.alpha_c2 = best.alpha * best.c ** 2

    logger.info("weak uniqueness: %d/%d runs optimal, relative c spread %.3e",
                len(report.optimal_seeds), len(seeds), report.spread)
    return report
