"""
Tests for the rearrangement optimizer, sweeps and pair storage.
"""

import importlib
import logging
import math
from dataclasses import replace

import numpy as np
import pytest

from composite_membrane.exceptions import InvalidInputError
from composite_membrane.geometry import build_grid, make_domain, rasterize_domain, weighted_quantile
from composite_membrane.optimizer import (
    InitKind,
    LambdaCurve,
    central_slope,
    initial_set,
    load_pair,
    optimize,
    radial_optimize,
    radial_sweep,
    save_pair,
    shape_derivative_residual,
    sweep,
)
from composite_membrane.utils import read_field_dump, read_manifest

J01_SQUARED = 2.404825557695773 ** 2


def test_optimal_pair_properties(disk_pair):
    pair = disk_pair
    cell = pair.grid.cell_area

    assert pair.converged
    assert pair.subcritical
    assert pair.c > 0
    assert abs(pair.D.measure - pair.A) < cell
    assert pair.descent_violation() <= 1e-6
    # D is the sublevel set of its own eigenfunction
    _, D_next = weighted_quantile(pair.u, pair.omega, pair.A)
    assert D_next.symmetric_difference(pair.D) < cell
    summary = pair.summary()
    assert summary["Lambda"] == pair.lam
    assert summary["iterations"] == len(pair.history)


def test_eigenvalue_bounds(disk_pair):
    # between the Dirichlet eigenvalue and that eigenvalue plus alpha
    assert J01_SQUARED * 0.98 < disk_pair.lam < J01_SQUARED + disk_pair.alpha


@pytest.mark.parametrize("kind", ["empty", "random", "annulus"])
def test_initial_set_measure(disk_problem, kind):
    spec, grid, omega = disk_problem
    D = initial_set(kind, spec, omega, 1.0, seed=3)

    assert D.measure == pytest.approx(1.0)
    assert np.all(D.weights <= omega.weights + 1e-15)


def test_annulus_start_is_outer_ring(disk_problem):
    spec, grid, omega = disk_problem
    D = initial_set(InitKind.ANNULUS, spec, omega, 1.0)
    X, Y = grid.coords

    assert D.weights[np.hypot(X, Y) < 0.5].sum() == 0


def test_optimize_rejects(disk_problem):
    spec, grid, omega = disk_problem
    with pytest.raises(InvalidInputError):
        optimize(spec, grid, 1.0, 0.0, omega=omega)
    with pytest.raises(InvalidInputError):
        optimize(spec, grid, 1.0, omega.measure, omega=omega)
    with pytest.raises(InvalidInputError):
        optimize(spec, grid, -1.0, 1.0, omega=omega)
    with pytest.raises(InvalidInputError):
        optimize(spec, grid, 1.0, 1.0, omega=omega, damping=1.0)


def test_radial_dirichlet_limit():
    sol = radial_optimize(1.0, 0.0, 1.0, n=2000)
    assert sol.lam == pytest.approx(J01_SQUARED, rel=1e-3)


def test_radial_matches_grid(disk_pair):
    sol = radial_optimize(1.0, disk_pair.alpha, disk_pair.A, n=2000)

    assert sol.converged
    assert disk_pair.lam == pytest.approx(sol.lam, rel=2e-2)
    assert disk_pair.c == pytest.approx(sol.c, rel=5e-2)
    assert sol.cut_radius == pytest.approx(math.sqrt(1.0 - disk_pair.A / math.pi))


def test_radial_sweep_increasing():
    curve = radial_sweep(1.0, 5.0, [0.5, 1.0, 1.5, 2.0, 2.5], n=1000)

    assert curve.strictly_increasing()
    assert curve.lipschitz_ok()
    assert all(s.subcritical for s in curve.samples)


def test_central_slope_exact_for_quadratics():
    A = [1.0, 1.5, 2.5]
    lam = [a ** 2 for a in A]
    assert central_slope(A, lam, 1) == pytest.approx(3.0)


def test_shape_derivative_residual_synthetic():
    alpha = 2.0
    A = [1.0, 1.5, 2.5, 3.0, 3.2]
    # Lambda = A^2 and c^2 = 2A / alpha give dLambda/dA = alpha c^2
    curve = LambdaCurve.from_values(alpha, A, [a ** 2 for a in A], [math.sqrt(2 * a / alpha) for a in A])
    report = shape_derivative_residual(curve)

    assert report.A == A[1:-1]
    assert report.maximum == pytest.approx(0.0, abs=1e-12)
    assert len(report.to_rows()) == 3


def test_shape_derivative_skips_zero_level():
    curve = LambdaCurve.from_values(1.0, [1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [0.0, 0.0, 0.0])
    report = shape_derivative_residual(curve)

    assert report.skipped == [2.0]
    assert math.isnan(report.median)


def test_shape_derivative_needs_three_samples():
    curve = LambdaCurve.from_values(1.0, [1.0, 2.0], [1.0, 2.0], [1.0, 1.0])
    with pytest.raises(InvalidInputError):
        shape_derivative_residual(curve)


def test_curve_checks():
    curve = LambdaCurve.from_values(1.0, [1.0, 2.0, 3.0], [5.0, 5.5, 5.4], [1.0, 1.0, 1.0])
    checks = curve.checks()

    assert checks["samples"] == 3
    assert checks["failed"] == 0
    assert checks["strictly_increasing"] is False
    assert [row["flag_subcritical"] for row in curve.to_rows()] == [1, 1, 1]


def test_sweep_rejects():
    spec = make_domain("disk", radius=1.0)
    grid = build_grid((-1.1, 1.1, -1.1, 1.1), 21, 21)
    with pytest.raises(InvalidInputError):
        sweep(spec, grid, 1.0, [])
    with pytest.raises(InvalidInputError):
        sweep(spec, grid, 1.0, [1.0, 0.5])
    with pytest.raises(InvalidInputError):
        sweep(spec, grid, 1.0, [1.0, 10.0])


@pytest.mark.slow
def test_sweep_warm_and_pooled():
    spec = make_domain("disk", radius=1.0)
    grid = build_grid((-1.1, 1.1, -1.1, 1.1), 41, 41)
    A_list = [0.8, 1.2, 1.6, 2.0]
    seen = []
    warm = sweep(spec, grid, 4.0, A_list, warm_start=True, on_pair=seen.append, tol=1e-8)
    pooled = sweep(spec, grid, 4.0, A_list, warm_start=False, threads=2, tol=1e-8)

    assert len(seen) == len(A_list)
    assert warm.checks()["failed"] == 0
    assert warm.strictly_increasing()
    assert warm.lipschitz_ok()
    for a, b in zip(warm.samples, pooled.samples):
        assert a.lam == pytest.approx(b.lam, rel=1e-4)


def test_save_and_load_pair(disk_pair, tmp_path):
    manifest = save_pair(disk_pair, tmp_path, manifest_extra={"command": "solve"}, subsamples=4)

    for name in ("u.txt", "D.txt", "history.csv", "u.pgm", "D.pgm", "manifest.json"):
        assert (tmp_path / name).exists()
    assert manifest["command"] == "solve"
    assert read_manifest(tmp_path / "manifest.json")["domain"]["shape"] == "disk"

    loaded = load_pair(tmp_path)
    assert loaded.lam == disk_pair.lam
    assert loaded.c == disk_pair.c
    assert np.array_equal(loaded.u.values, disk_pair.u.values)
    assert np.array_equal(loaded.D.weights, disk_pair.D.weights)
    assert np.array_equal(loaded.omega.inside, disk_pair.omega.inside)
    assert loaded.iterations == disk_pair.iterations

    _, _, header = read_field_dump(tmp_path / "u.txt", extra_header=True)
    lam, _, eigen_iterations = header.split()
    assert float(lam) == disk_pair.lam
    # inverse iterations of the final eigen-solve, not optimizer iterations
    assert int(eigen_iterations) == disk_pair.eigen_iterations == disk_pair.history[-1].eigen_iterations


def test_load_pair_missing(tmp_path):
    with pytest.raises(InvalidInputError):
        load_pair(tmp_path)


def test_disk_pair_is_radial(disk_pair):
    assert disk_pair.D.radial_symmetry_defect((0.0, 0.0), disk_pair.omega) <= 0.02


def test_lambda_increase_is_logged(monkeypatch, caplog):
    module = importlib.import_module("composite_membrane.optimizer.optimizer")
    solve = module.ground_state
    calls = []

    def bumped_second_solve(*args, **kwargs):
        eig = solve(*args, **kwargs)
        calls.append(eig.lam)
        return replace(eig, lam=eig.lam + 1.0) if len(calls) == 2 else eig

    monkeypatch.setattr(module, "ground_state", bumped_second_solve)
    spec = make_domain("disk", radius=1.0)
    grid = build_grid((-1.1, 1.1, -1.1, 1.1), 31, 31)
    omega = rasterize_domain(spec, grid)
    with caplog.at_level(logging.WARNING, logger="composite_membrane.optimizer.optimizer"):
        pair = optimize(spec, grid, 4.0, 0.5 * omega.measure, omega=omega, max_iter=3, eigen_tol=1e-10)

    warnings = [r for r in caplog.records if r.levelno == logging.WARNING and "Lambda increased" in r.getMessage()]
    assert len(calls) >= 3
    assert warnings
    assert pair.descent_violation() > 0


@pytest.mark.slow
def test_ellipse_descent_and_fixed_point(ellipse_pair):
    pair = ellipse_pair

    assert pair.converged
    assert pair.descent_violation() <= 1e-9
    _, D_next = weighted_quantile(pair.u, pair.omega, pair.A)
    assert D_next.symmetric_difference(pair.D) <= pair.grid.cell_area


@pytest.mark.slow
def test_rectangle_descent_and_fixed_point(rectangle_pair):
    pair = rectangle_pair

    assert pair.converged
    assert pair.descent_violation() <= 1e-9
    _, D_next = weighted_quantile(pair.u, pair.omega, pair.A)
    assert D_next.symmetric_difference(pair.D) <= pair.grid.cell_area


@pytest.mark.slow
def test_disk_sweep_matches_shape_derivative():
    spec = make_domain("disk", radius=1.0)
    grid = build_grid((-1.1, 1.1, -1.1, 1.1), 129, 129)
    A_list = np.linspace(0.2 * math.pi, 0.8 * math.pi, 9)
    curve = sweep(spec, grid, 10.0, A_list, tol=1e-8, eigen_tol=1e-10)
    report = shape_derivative_residual(curve)

    assert len(report.residuals) == 7
    assert report.median <= 0.05
