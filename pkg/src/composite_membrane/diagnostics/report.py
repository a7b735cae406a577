"""
Diagnostics report: one CSV block ``check,param,value,tolerance,pass`` per solved pair.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from ..config import get_settings
from ..exceptions import ConvergenceError, ExtractionError, InvalidInputError
from ..optimizer.models import OptimalPair
from ..utils.data_utils import write_csv
from .levelset import gradient_on_boundary, levelset_thickness
from .pohozaev import pohozaev_sides
from .symmetry import symmetry_singularity_check
from .uniqueness import weak_uniqueness_experiment

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["check", "param", "value", "tolerance", "pass"]

POHOZAEV_TOL = 0.03
C_SPREAD_TOL = 1e-3
DEFAULT_EPS_FRACTIONS = (0.2, 0.1, 0.05, 0.025)

Point = Tuple[float, float]


@dataclass(frozen=True)
class DiagnosticRow:
    check: str
    param: str
    value: float
    tolerance: float
    passed: Optional[bool]

    @property
    def verdict(self) -> str:
        if self.passed is None:
            return "skip"
        return "true" if self.passed else "false"

    def to_dict(self) -> Dict[str, Any]:
        return {"check": self.check, "param": self.param, "value": self.value,
                "tolerance": self.tolerance, "pass": self.verdict}


def pohozaev_rows(pair: OptimalPair, x0_list: Sequence[Point]) -> List[DiagnosticRow]:
    rows = []
    for x0 in x0_list:
        try:
            result = pohozaev_sides(pair, x0)
        except ExtractionError as e:
            logger.warning("boundary flux at %s: %s", tuple(x0), e)
            rows.append(DiagnosticRow("pohozaev", f"x0={x0[0]:g} {x0[1]:g}", math.nan, POHOZAEV_TOL, False))
            continue
        rows.append(DiagnosticRow("pohozaev", f"x0={x0[0]:g} {x0[1]:g}", result.residual,
                                  POHOZAEV_TOL, result.residual <= POHOZAEV_TOL))
    return rows


def uniqueness_rows(pair: OptimalPair, seeds: Sequence[int], slope_probe: float = 0.0,
                    **optimize_kwargs) -> List[DiagnosticRow]:
    try:
        report = weak_uniqueness_experiment(pair.spec, pair.grid, pair.alpha, pair.A, seeds,
                                            slope_probe=slope_probe, **optimize_kwargs)
    except ConvergenceError as e:
        logger.warning("weak uniqueness: %s", e)
        return [DiagnosticRow("weak_uniqueness", f"seeds={len(seeds)}", math.nan, C_SPREAD_TOL, False)]
    rows = [DiagnosticRow("weak_uniqueness", f"seeds={len(seeds)}", report.spread,
                          C_SPREAD_TOL, report.spread <= C_SPREAD_TOL)]
    if report.slope is not None:
        rows.append(DiagnosticRow("weak_uniqueness", "dLambda_dA", report.slope, report.alpha_c2, None))
    return rows


def levelset_rows(pair: OptimalPair, eps_list: Optional[Sequence[float]] = None) -> List[DiagnosticRow]:
    eps_list = eps_list or [f * pair.c for f in DEFAULT_EPS_FRACTIONS]
    report = levelset_thickness(pair.u, pair.c, eps_list)
    monotone = report.monotone()
    rows = [
        DiagnosticRow("levelset_thickness", f"eps={e:.6g}", rel, math.nan, monotone)
        for e, rel in zip(report.eps, report.relative)
    ]
    rows.append(DiagnosticRow("levelset_thickness", "slope", report.slope, math.nan, math.isfinite(report.slope)))
    return rows


def gradient_rows(pair: OptimalPair, tau: Optional[float] = None) -> List[DiagnosticRow]:
    try:
        result = gradient_on_boundary(pair, tau)
    except (ExtractionError, InvalidInputError) as e:
        logger.warning("gradient on F: %s", e)
        return [DiagnosticRow("gradient_on_boundary", "max", math.nan, math.nan, False)]
    return [
        DiagnosticRow("gradient_on_boundary", "max", result.max_grad, result.threshold, result.passed),
        DiagnosticRow("gradient_on_boundary", "min", result.min_grad, result.threshold, None),
        DiagnosticRow("gradient_on_boundary", "singular_fraction", result.singular_fraction, math.nan, None),
    ]


def symmetry_rows(pair: OptimalPair, tau: Optional[float] = None) -> List[DiagnosticRow]:
    if pair.spec.symmetry_axes != 2:
        return [DiagnosticRow("symmetry_singularity", f"axes={pair.spec.symmetry_axes}", math.nan, math.nan, None)]
    try:
        verdict = symmetry_singularity_check(pair, tau=tau)
    except ExtractionError as e:
        logger.warning("symmetry check: %s", e)
        return [DiagnosticRow("symmetry_singularity", "min_grad", math.nan, math.nan, False)]
    return [
        DiagnosticRow("symmetry_singularity", "min_grad", verdict.min_grad, verdict.threshold, verdict.passed),
        DiagnosticRow("symmetry_singularity", "components", verdict.n_components, 1, verdict.n_components == 1),
    ]


def run_all(
    pair: OptimalPair,
    x0_list: Sequence[Point],
    seeds: Sequence[int] = (0,),
    eps_list: Optional[Sequence[float]] = None,
    tau: Optional[float] = None,
    slope_probe: float = 0.0,
    **optimize_kwargs,
) -> List[DiagnosticRow]:
    """All five checks on one pair, in a fixed order."""
    tau = get_settings().tau if tau is None else tau
    rows: List[DiagnosticRow] = []
    rows += pohozaev_rows(pair, x0_list)
    rows += uniqueness_rows(pair, seeds, slope_probe, **optimize_kwargs)
    rows += levelset_rows(pair, eps_list)
    rows += gradient_rows(pair, tau)
    rows += symmetry_rows(pair, tau)
    failed = [r for r in rows if r.passed is False]
    logger.info("diagnostics: %d rows, %d failed", len(rows), len(failed))
    return rows


def write_report(path: Union[str, Path], rows: Sequence[DiagnosticRow]) -> Path:
    return write_csv(path, [r.to_dict() for r in rows], CSV_COLUMNS)
