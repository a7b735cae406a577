"""
The Schrodinger operator -Laplace + alpha * chi_D on the unknown nodes of a domain.
"""

import logging
import threading
import weakref
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator

from ..exceptions import InvalidInputError
from ..geometry import DomainMask, Grid2D, ScalarField
from ..geometry.domain import NEIGHBOURS

logger = logging.getLogger(__name__)

_laplacian_cache: "weakref.WeakKeyDictionary[DomainMask, tuple]" = weakref.WeakKeyDictionary()
_cache_lock = threading.Lock()


def _node_index(omega: DomainMask) -> np.ndarray:
    index = np.full(omega.grid.shape, -1, dtype=np.int64)
    index[omega.inside] = np.arange(omega.n_inside)
    return index


def dirichlet_laplacian(omega: DomainMask):
    """
    5-point Dirichlet Laplacian ``-Laplace_h`` on the unknowns of ``omega``.

    A neighbour outside the domain contributes ``1/(theta h^2)`` to the
    diagonal, where ``theta`` is the inside fraction of that grid edge.
    Returns ``(matrix, index)``; the matrix is symmetric positive definite.
    """
    with _cache_lock:
        cached = _laplacian_cache.get(omega)
    if cached is not None:
        return cached

    grid = omega.grid
    index = _node_index(omega)
    n = omega.n_inside
    jj, ii = np.nonzero(omega.inside)
    rows = np.arange(n)
    diag = np.zeros(n)
    off_rows, off_cols, off_vals = [], [], []
    for d, (dj, di) in enumerate(NEIGHBOURS):
        h2 = grid.hx ** 2 if di else grid.hy ** 2
        neighbour = index[jj + dj, ii + di]
        linked = neighbour >= 0
        off_rows.append(rows[linked])
        off_cols.append(neighbour[linked])
        off_vals.append(np.full(int(linked.sum()), -1.0 / h2))
        if omega.edge_fraction is not None:
            theta = omega.edge_fraction[d, jj, ii]
        else:
            theta = np.ones(n)
        diag += np.where(linked, 1.0 / h2, 1.0 / (theta * h2))

    matrix = sparse.csr_matrix(
        (np.concatenate(off_vals), (np.concatenate(off_rows), np.concatenate(off_cols))),
        shape=(n, n),
    ) + sparse.diags(diag, format="csr")
    result = (matrix.tocsr(), index)
    with _cache_lock:
        _laplacian_cache[omega] = result
    return result


@dataclass(frozen=True, eq=False)
class SchrodingerOperator:
    """``L = -Laplace_h + alpha * frac_D`` restricted to the unknowns of ``omega``."""

    omega: DomainMask
    D: DomainMask
    alpha: float
    laplacian: sparse.csr_matrix = field(repr=False)
    potential: np.ndarray = field(repr=False)

    @property
    def grid(self) -> Grid2D:
        return self.omega.grid

    @property
    def size(self) -> int:
        return self.omega.n_inside

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.laplacian @ x + self.potential * x

    def diagonal(self) -> np.ndarray:
        return self.laplacian.diagonal() + self.potential

    def as_linear_operator(self) -> LinearOperator:
        return LinearOperator((self.size, self.size), matvec=self.matvec, dtype=float)

    def to_vector(self, u: ScalarField) -> np.ndarray:
        return u.values[self.omega.inside]

    def to_field(self, x: np.ndarray) -> ScalarField:
        values = np.zeros(self.grid.shape)
        values[self.omega.inside] = x
        return ScalarField(self.omega, values)

    def apply(self, u: ScalarField) -> ScalarField:
        return self.to_field(self.matvec(self.to_vector(u)))

    def potential_field(self) -> ScalarField:
        return self.to_field(self.potential)


def assemble(grid: Grid2D, mask: DomainMask, D: DomainMask, alpha: float) -> SchrodingerOperator:
    """
    Assemble ``-Laplace_h + alpha * chi_D`` on ``mask``.

    The potential at a node is ``alpha`` times the share of the node's cell
    weight that belongs to ``D``.
    """
    if alpha < 0 or not np.isfinite(alpha):
        raise InvalidInputError(f"alpha must be >= 0, got {alpha}")
    if mask.grid != grid or D.grid != grid:
        raise InvalidInputError("operator grid, domain mask and D must share one grid")
    if mask.n_inside == 0:
        raise InvalidInputError("domain has no interior unknowns")
    excess = D.weights - mask.weights
    if np.any(excess > 1e-12 * grid.cell_area):
        raise InvalidInputError(
            f"D is not contained in the domain (excess measure {float(excess[excess > 0].sum()):.3g})"
        )
    laplacian, _ = dirichlet_laplacian(mask)
    potential = float(alpha) * D.fraction_of(mask)[mask.inside]
    return SchrodingerOperator(mask, D, float(alpha), laplacian, potential)


def rayleigh(u: ScalarField, op: SchrodingerOperator) -> float:
    """Discrete Rayleigh quotient ``<Lu, u> / <u, u>`` on the unknowns."""
    x = op.to_vector(u)
    norm2 = float(x @ x)
    if norm2 == 0.0:
        raise InvalidInputError("Rayleigh quotient of the zero field")
    return float(x @ op.matvec(x)) / norm2
