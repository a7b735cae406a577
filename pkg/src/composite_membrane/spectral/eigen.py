"""
Ground state of the Schrodinger operator by inverse power iteration.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from ..config import get_settings
from ..exceptions import ConvergenceError, InvalidInputError
from ..geometry import ScalarField
from .operator import SchrodingerOperator

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Lowest eigenvalue with its positive ground state, normalized in the cell-weighted L2 norm."""

    lam: float
    u: ScalarField = field(repr=False)
    residual: float
    iterations: int
    cg_iterations: int = 0

    def header(self) -> str:
        """One-line ``lambda residual iterations`` header for field dumps."""
        return f"{self.lam!r} {self.residual!r} {self.iterations}"

    def to_dict(self):
        return {
            "lambda": self.lam,
            "residual": self.residual,
            "iterations": self.iterations,
            "cg_iterations": self.cg_iterations,
        }


def ground_state(
    op: SchrodingerOperator,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    start: Optional[ScalarField] = None,
) -> EigenPair:
    """
    Smallest eigenpair of ``op``.

    Inverse iteration with diagonal-preconditioned CG inner solves
    (relative tolerance ``tol/10``) and zero shift. The eigenvalue is the
    Rayleigh quotient of the iterate; the iteration stops once
    ``||Lu - lam u|| <= tol * max(1, lam)``. The start vector is all ones
    unless ``start`` is given.
    """
    settings = get_settings()
    tol = settings.eigen_tol if tol is None else tol
    max_iter = settings.eigen_max_iter if max_iter is None else max_iter
    if not tol > 0:
        raise InvalidInputError(f"tol must be > 0, got {tol}")
    if op.size == 0:
        raise InvalidInputError("empty interior")

    A = op.as_linear_operator()
    inv_diag = 1.0 / op.diagonal()
    M = LinearOperator((op.size, op.size), matvec=lambda r: inv_diag * r, dtype=float)

    x = np.ones(op.size)
    if start is not None:
        candidate = np.abs(op.to_vector(start))
        if np.any(candidate > 0):
            x = candidate
    x = x / np.linalg.norm(x)
    Ax = op.matvec(x)
    lam = float(x @ Ax)
    residual = float(np.linalg.norm(Ax - lam * x))

    cg_count = 0

    def _count(_):
        nonlocal cg_count
        cg_count += 1

    iterations = 0
    while iterations < max_iter:
        iterations += 1
        y, info = cg(A, x, x0=x / lam, rtol=tol / 10, maxiter=settings.cg_max_iter, M=M, callback=_count)
        if info != 0:
            inner = float(np.linalg.norm(x - op.matvec(y)))
            raise ConvergenceError("conjugate gradient did not converge", last_residual=inner, iterations=iterations)
        x = y / np.linalg.norm(y)
        Ax = op.matvec(x)
        lam = float(x @ Ax)
        residual = float(np.linalg.norm(Ax - lam * x))
        logger.debug("inverse iteration %d: lambda=%.12g residual=%.3e", iterations, lam, residual)
        if residual <= tol * max(1.0, lam):
            break
    else:
        raise ConvergenceError("inverse iteration did not reach tolerance", last_residual=residual, iterations=iterations)

    if x.sum() < 0:
        x = -x
    u = op.to_field(x / math.sqrt(op.grid.cell_area))
    return EigenPair(lam, u, residual, iterations, cg_count)


def l2_norm(u: ScalarField) -> float:
    """Cell-weighted discrete L2 norm on the unknowns."""
    x = u.inside_values()
    return math.sqrt(u.grid.cell_area * float(x @ x))
