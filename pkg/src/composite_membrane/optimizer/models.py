"""
Data models for the rearrangement optimizer.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from ..geometry import DomainMask, DomainSpec, Grid2D, ScalarField


class InitKind(Enum):
    """Initial guesses for the set D."""
    EMPTY = "empty"
    RANDOM = "random"
    ANNULUS = "annulus"


@dataclass
class IterationRecord:
    """One fixed-point step: eigenvalue of D_k, cut level of u_k, and |D_{k+1} - D_k|."""
    iteration: int
    lam: float
    c: float
    symdiff: float
    eigen_iterations: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "iteration": self.iteration,
            "Lambda": self.lam,
            "c": self.c,
            "symdiff": self.symdiff,
            "eigen_iterations": self.eigen_iterations,
        }


@dataclass(eq=False)
class OptimalPair:
    """Eigenfunction ``u`` of ``-Laplace + alpha chi_D`` with ``D = {u <= c}`` of measure ``A``."""
    spec: DomainSpec
    omega: DomainMask
    u: ScalarField
    D: DomainMask
    c: float
    lam: float
    alpha: float
    A: float
    history: List[IterationRecord] = field(default_factory=list)
    converged: bool = False
    init: InitKind = InitKind.ANNULUS
    seed: Optional[int] = None
    eigen_residual: float = 0.0

    @property
    def grid(self) -> Grid2D:
        return self.omega.grid

    @property
    def iterations(self) -> int:
        return len(self.history)

    @property
    def eigen_iterations(self) -> int:
        """Inverse-iteration count of the eigen-solve that produced ``u``."""
        return self.history[-1].eigen_iterations if self.history else 0

    @property
    def subcritical(self) -> bool:
        """The standing assumption ``alpha < Lambda``."""
        return self.alpha < self.lam

    @property
    def complement_measure(self) -> float:
        return self.omega.measure - self.D.measure

    def d_integral(self) -> float:
        """``integral_D u^2`` with the same cell weighting as the operator."""
        frac = self.D.fraction_of(self.omega)
        return float(self.grid.cell_area * np.sum(frac * self.u.values ** 2))

    def descent_violation(self) -> float:
        """Largest increase ``Lambda_{k+1} - Lambda_k`` along the history (0 if monotone)."""
        lams = [rec.lam for rec in self.history]
        if len(lams) < 2:
            return 0.0
        return max(0.0, float(np.max(np.diff(lams))))

    def summary(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "A": self.A,
            "c": self.c,
            "Lambda": self.lam,
            "measure_D": self.D.measure,
            "measure_Omega": self.omega.measure,
            "iterations": self.iterations,
            "converged": self.converged,
            "subcritical": self.subcritical,
            "init": self.init.value,
            "seed": self.seed,
            "eigen_residual": self.eigen_residual,
        }


@dataclass
class CurveSample:
    """One point of a Lambda(A) curve; failed samples keep ``error`` and NaN values."""
    A: float
    lam: float
    c: float
    iterations: int
    converged: bool
    subcritical: bool
    max_u: float = math.nan
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None and math.isfinite(self.lam)

    def to_row(self) -> Dict[str, Any]:
        return {
            "A": self.A,
            "Lambda": self.lam,
            "c": self.c,
            "iterations": self.iterations,
            "flag_subcritical": int(self.subcritical),
        }


@dataclass
class LambdaCurve:
    """Samples ``(A_i, Lambda_i, c_i)`` at fixed alpha and domain."""
    alpha: float
    samples: List[CurveSample] = field(default_factory=list)

    CSV_COLUMNS = ["A", "Lambda", "c", "iterations", "flag_subcritical"]

    @classmethod
    def from_values(cls, alpha: float, A: List[float], lam: List[float], c: List[float]) -> "LambdaCurve":
        samples = [
            CurveSample(float(a), float(l), float(ci), 0, True, alpha < l)
            for a, l, ci in zip(A, lam, c)
        ]
        return cls(alpha, samples)

    @property
    def valid(self) -> List[CurveSample]:
        return [s for s in self.samples if s.ok]

    def strictly_increasing(self) -> bool:
        lams = [s.lam for s in self.valid]
        return all(b > a for a, b in zip(lams, lams[1:]))

    def lipschitz_ratios(self) -> List[float]:
        pts = self.valid
        return [(b.lam - a.lam) / (b.A - a.A) for a, b in zip(pts, pts[1:])]

    def lipschitz_ok(self) -> bool:
        """``|dLambda/dA| <= alpha * (max u)^2`` on every consecutive pair."""
        pts = self.valid
        for (a, b), ratio in zip(zip(pts, pts[1:]), self.lipschitz_ratios()):
            bound = self.alpha * max(a.max_u, b.max_u) ** 2
            if math.isfinite(bound) and abs(ratio) > bound * (1 + 1e-6):
                return False
        return True

    def checks(self) -> Dict[str, Any]:
        return {
            "samples": len(self.samples),
            "failed": len(self.samples) - len(self.valid),
            "strictly_increasing": self.strictly_increasing(),
            "lipschitz_ok": self.lipschitz_ok(),
        }

    def to_rows(self) -> List[Dict[str, Any]]:
        return [s.to_row() for s in self.samples]
