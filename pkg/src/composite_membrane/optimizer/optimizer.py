"""
Rearrangement fixed point for the optimal configuration Lambda(alpha, A).
"""

import logging
from typing import Optional, Union

import numpy as np
from scipy import ndimage

from ..config import get_settings
from ..exceptions import InvalidInputError
from ..geometry import DomainMask, DomainSpec, Grid2D, ScalarField, rasterize_domain, weighted_quantile
from ..geometry.quantile import quantile_weights
from ..spectral import assemble, ground_state
from .models import InitKind, IterationRecord, OptimalPair

logger = logging.getLogger(__name__)

RANDOM_SMOOTHING_CELLS = 2.0


def _mask_from_admitted(omega: DomainMask, admitted: np.ndarray) -> DomainMask:
    return DomainMask(omega.grid, admitted > 0, admitted)


def initial_set(
    kind: Union[InitKind, str],
    spec: DomainSpec,
    omega: DomainMask,
    A: float,
    seed: Optional[int] = 0,
    alpha: float = 0.0,
    eigen_tol: Optional[float] = None,
) -> DomainMask:
    """
    A starting set of measure ``A``.

    ``empty`` takes the sublevel set of the plain Dirichlet ground state,
    ``annulus`` the points farthest from the shape centre, ``random`` a
    seeded Bernoulli field smoothed over a few cells and projected by quantile.
    """
    kind = InitKind(kind)
    grid = omega.grid
    if kind is InitKind.EMPTY:
        op = assemble(grid, omega, DomainMask.empty_like(omega), alpha)
        eig = ground_state(op, tol=eigen_tol)
        return weighted_quantile(eig.u, omega, A)[1]

    if kind is InitKind.ANNULUS:
        X, Y = grid.coords
        cx, cy = spec.center
        score = -((X - cx) ** 2 + (Y - cy) ** 2)
    else:
        rng = np.random.default_rng(seed)
        p = A / omega.measure
        bernoulli = (rng.random(grid.shape) < p).astype(float)
        score = -ndimage.gaussian_filter(bernoulli, sigma=RANDOM_SMOOTHING_CELLS, mode="constant")
    _, admitted = quantile_weights(score, omega.weights, A)
    return _mask_from_admitted(omega, admitted)


def optimize(
    spec: DomainSpec,
    grid: Grid2D,
    alpha: float,
    A: float,
    init: Union[InitKind, str] = InitKind.ANNULUS,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    seed: Optional[int] = 0,
    eigen_tol: Optional[float] = None,
    damping: Optional[float] = None,
    D0: Optional[DomainMask] = None,
    omega: Optional[DomainMask] = None,
    start: Optional[ScalarField] = None,
) -> OptimalPair:
    """
    Minimize the ground-state eigenvalue over sets D of measure ``A``.

    Iterates ``D_{k+1} = weighted_quantile(u_k, A)`` where ``u_k`` is the
    ground state for ``D_k``. Stops once both the eigenvalue change is below
    ``tol`` and ``|D_{k+1} - D_k|`` is below one cell area. Non-convergence
    is reported on the returned pair rather than raised; so is ``alpha >= Lambda``.
    """
    settings = get_settings()
    tol = settings.optimizer_tol if tol is None else tol
    max_iter = settings.max_iter if max_iter is None else max_iter
    eigen_tol = settings.eigen_tol if eigen_tol is None else eigen_tol
    damping = settings.damping if damping is None else damping
    if alpha < 0:
        raise InvalidInputError(f"alpha must be >= 0, got {alpha}")
    if not 0 <= damping < 1:
        raise InvalidInputError(f"damping must lie in [0, 1), got {damping}")
    if max_iter < 1:
        raise InvalidInputError("max_iter must be >= 1")

    omega = omega if omega is not None else rasterize_domain(spec, grid)
    if omega.grid != grid:
        raise InvalidInputError("domain mask was rasterized on a different grid")
    if not 0 < A < omega.measure:
        raise InvalidInputError(f"A={A!r} must lie strictly between 0 and |Omega|={omega.measure!r}")

    init_kind = InitKind(init)
    if D0 is None:
        D = initial_set(init_kind, spec, omega, A, seed=seed, alpha=0.0, eigen_tol=eigen_tol)
    else:
        if abs(D0.measure - A) > grid.cell_area:
            _, admitted = quantile_weights(-D0.fraction_of(omega), omega.weights, A)
            D = _mask_from_admitted(omega, admitted)
        else:
            D = D0

    history = []
    cell = grid.cell_area
    prev_lam = None
    converged = False
    u_prev = start
    eig = None
    c = 0.0
    D_current = D
    for k in range(max_iter):
        op = assemble(grid, omega, D, alpha)
        eig = ground_state(op, tol=eigen_tol, start=u_prev)
        c, D_next = weighted_quantile(eig.u, omega, A)
        if damping > 0:
            blended = (1 - damping) * D_next.weights + damping * D.weights
            D_next = _mask_from_admitted(omega, blended)
        symdiff = D_next.symmetric_difference(D)
        history.append(IterationRecord(k, eig.lam, c, symdiff, eig.iterations))
        logger.debug("iteration %d: Lambda=%.12g c=%.8g |dD|=%.3e", k, eig.lam, c, symdiff)

        if prev_lam is not None and eig.lam > prev_lam + 10 * eigen_tol:
            logger.warning("Lambda increased by %.3e at iteration %d (eigen tol %.1e)",
                           eig.lam - prev_lam, k, eigen_tol)
        D_current = D
        if prev_lam is not None and abs(eig.lam - prev_lam) < tol and symdiff < cell:
            converged = True
            break
        prev_lam = eig.lam
        D = D_next
        u_prev = eig.u

    pair = OptimalPair(
        spec=spec,
        omega=omega,
        u=eig.u,
        D=D_current,
        c=c,
        lam=eig.lam,
        alpha=float(alpha),
        A=float(A),
        history=history,
        converged=converged,
        init=init_kind,
        seed=seed,
        eigen_residual=eig.residual,
    )
    if converged:
        logger.info("Converged in %d iterations: Lambda=%.10g, c=%.8g (alpha=%g, A=%g)",
                    pair.iterations, pair.lam, pair.c, alpha, A)
    else:
        logger.warning("No convergence after %d iterations: Lambda=%.10g, last |dD|=%.3e",
                       max_iter, pair.lam, history[-1].symdiff)
    if not pair.subcritical:
        logger.warning("alpha=%g >= Lambda=%.6g: outside the subcritical regime", alpha, pair.lam)
    return pair
