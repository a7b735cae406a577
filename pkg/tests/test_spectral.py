"""
Tests for the Schrodinger operator and its ground state.
"""

import math

import numpy as np
import pytest

from composite_membrane.config import RunConfig
from composite_membrane.exceptions import ConvergenceError, InvalidInputError
from composite_membrane.geometry import (
    DomainMask,
    ScalarField,
    build_grid,
    make_domain,
    rasterize_domain,
    weighted_quantile,
)
from composite_membrane.spectral import assemble, ground_state, l2_norm, rayleigh


@pytest.fixture(scope="module")
def unit_square():
    spec = make_domain("rectangle", bounds=(0.0, 1.0, 0.0, 1.0))
    grid = build_grid((-0.1, 1.1, -0.1, 1.1), 61, 61)
    return grid, rasterize_domain(spec, grid)


def test_dirichlet_square_eigenvalue(unit_square):
    grid, omega = unit_square
    op = assemble(grid, omega, DomainMask.empty_like(omega), 0.0)
    eig = ground_state(op, tol=1e-10)

    assert eig.lam == pytest.approx(2 * math.pi ** 2, rel=5e-3)
    assert np.all(eig.u.inside_values() > 0)
    assert l2_norm(eig.u) == pytest.approx(1.0)
    assert rayleigh(eig.u, op) == pytest.approx(eig.lam, rel=1e-9)


def discrete_square_eigenvalue(h):
    """Smallest eigenvalue of the 5-point Dirichlet Laplacian on the unit square."""
    return 8.0 / h ** 2 * math.sin(math.pi * h / 2) ** 2


def square_ground_state(grid):
    spec = make_domain("rectangle", bounds=(0.0, 1.0, 0.0, 1.0))
    omega = rasterize_domain(spec, grid)
    return omega, ground_state(assemble(grid, omega, DomainMask.empty_like(omega), 0.0), tol=1e-10)


def test_square_matches_discrete_eigenvalue():
    grid = build_grid((0.0, 1.0, 0.0, 1.0), 41, 41)
    omega, eig = square_ground_state(grid)

    assert omega.n_inside == 39 ** 2
    assert eig.lam == pytest.approx(discrete_square_eigenvalue(1 / 40), rel=1e-8)


@pytest.mark.parametrize("bbox, n, cells", [((-0.1, 1.1, -0.1, 1.1), 61, 50)])
def test_square_with_rounded_boundary_nodes(bbox, n, cells):
    # grid nodes land on x = 0 and x = 1 only up to rounding
    omega, eig = square_ground_state(build_grid(bbox, n, n))

    assert omega.n_inside == (cells - 1) ** 2
    assert eig.lam == pytest.approx(discrete_square_eigenvalue(1 / cells), rel=1e-8)


@pytest.mark.parametrize("nx, cells", [(65, 60), (97, 92)])
def test_square_on_margin_grid(nx, cells):
    config = RunConfig.from_dict({"domain.shape": "rectangle", "grid.nx": nx, "grid.ny": nx})
    omega, eig = square_ground_state(config.grid())

    assert omega.n_inside == (cells - 1) ** 2
    assert eig.lam == pytest.approx(discrete_square_eigenvalue(1 / cells), rel=1e-8)


@pytest.mark.slow
def test_disk_eigenvalue():
    spec = make_domain("disk", radius=1.0)
    grid = build_grid((-1.1, 1.1, -1.1, 1.1), 161, 161)
    omega = rasterize_domain(spec, grid)
    eig = ground_state(assemble(grid, omega, DomainMask.empty_like(omega), 0.0), tol=1e-10)

    assert eig.lam == pytest.approx(2.404825557695773 ** 2, rel=5e-3)


def test_full_potential_shifts_by_alpha(unit_square):
    grid, omega = unit_square
    base = ground_state(assemble(grid, omega, DomainMask.empty_like(omega), 0.0), tol=1e-10)
    shifted = ground_state(assemble(grid, omega, omega, 3.0), tol=1e-10)

    assert shifted.lam == pytest.approx(base.lam + 3.0, rel=1e-8)


def test_eigenvalue_increases_with_alpha(unit_square):
    grid, omega = unit_square
    X, Y = grid.coords

    _, D = weighted_quantile(ScalarField(omega, -np.hypot(X - 0.5, Y - 0.5)), omega, 0.5 * omega.measure)
    lams = [ground_state(assemble(grid, omega, D, a), tol=1e-10).lam for a in (0.0, 1.0, 5.0)]

    assert lams[0] < lams[1] < lams[2]
    # the potential covers half the area, so the shift is below alpha
    assert lams[2] - lams[0] < 5.0


def test_assemble_rejects(unit_square):
    grid, omega = unit_square
    with pytest.raises(InvalidInputError):
        assemble(grid, omega, DomainMask.empty_like(omega), -1.0)
    with pytest.raises(InvalidInputError):
        assemble(grid, omega, DomainMask.full(grid), 1.0)
    other = build_grid((-0.2, 1.2, -0.2, 1.2), 61, 61)
    with pytest.raises(InvalidInputError):
        assemble(other, omega, DomainMask.empty_like(omega), 1.0)


def test_ground_state_rejects_tolerance(unit_square):
    grid, omega = unit_square
    op = assemble(grid, omega, DomainMask.empty_like(omega), 0.0)
    with pytest.raises(InvalidInputError):
        ground_state(op, tol=0.0)


def test_eigen_header(unit_square):
    grid, omega = unit_square
    eig = ground_state(assemble(grid, omega, DomainMask.empty_like(omega), 0.0), tol=1e-8)

    lam, residual, iterations = eig.header().split()
    assert float(lam) == eig.lam
    assert int(iterations) == eig.iterations
    assert eig.to_dict()["lambda"] == eig.lam


def test_ground_state_reports_non_convergence(unit_square):
    grid, omega = unit_square
    op = assemble(grid, omega, DomainMask.empty_like(omega), 0.0)
    with pytest.raises(ConvergenceError) as info:
        ground_state(op, tol=1e-14, max_iter=1)

    assert info.value.iterations == 1
    assert info.value.last_residual > 0
