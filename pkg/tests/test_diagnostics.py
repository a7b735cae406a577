"""
Tests for the boundary-flux identity, weak uniqueness, level sets and the report.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from composite_membrane.diagnostics import (
    DiagnosticRow,
    gradient_on_boundary,
    gradient_on_contour,
    levelset_thickness,
    pohozaev_residual,
    pohozaev_sides,
    run_all,
    symmetry_singularity_check,
    weak_uniqueness_experiment,
    write_report,
)
from composite_membrane.diagnostics.report import levelset_rows, symmetry_rows
from composite_membrane.config import RunConfig
from composite_membrane.exceptions import InvalidInputError
from composite_membrane.geometry import DomainMask, ScalarField, build_grid, make_domain, rasterize_domain
from composite_membrane.optimizer import OptimalPair
from composite_membrane.spectral import assemble, ground_state
from composite_membrane.utils import read_csv

SQUARE = ((-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0))


def test_pohozaev_on_disk(disk_pair):
    result = pohozaev_sides(disk_pair, (0.0, 0.0))

    assert result.dropped_fraction == 0.0
    assert result.n_samples > 0
    assert result.lhs > 0
    assert result.residual <= 0.03


def test_pohozaev_independent_of_center(disk_pair):
    residuals = [pohozaev_residual(disk_pair, x0) for x0 in [(0.0, 0.0), (5.0, -3.0), (-2.0, 7.0)]]

    assert max(residuals) <= 0.03
    assert max(residuals) - min(residuals) < 0.01


def dirichlet_disk_pair(n):
    """Plain Dirichlet ground state of the unit disk, wrapped as a pair with alpha = 0 and empty D."""
    spec = make_domain("disk", radius=1.0)
    grid = build_grid((-1.1, 1.1, -1.1, 1.1), n, n)
    omega = rasterize_domain(spec, grid)
    empty = DomainMask.empty_like(omega)
    eig = ground_state(assemble(grid, omega, empty, 0.0), tol=1e-10)
    return OptimalPair(spec, omega, eig.u, empty, 0.0, eig.lam, 0.0, 0.0, converged=True)


def test_pohozaev_improves_under_refinement():
    # with alpha = 0 the flux identity reduces to Rellich's and only discretization error remains
    coarse, fine = (pohozaev_residual(dirichlet_disk_pair(n)) for n in (31, 121))

    assert fine <= 0.03
    assert fine * 1.5 <= coarse


def test_levelset_exact_for_linear_field():
    grid = build_grid((0.0, 1.0, 0.0, 1.0), 101, 101)
    u = ScalarField.from_function(DomainMask.full(grid), lambda x, y: x)
    report = levelset_thickness(u, 0.5, [0.2, 0.1, 0.05])

    assert report.region_measure == pytest.approx(1.0)
    assert report.measures == pytest.approx([0.4, 0.2, 0.1])
    assert report.slope == pytest.approx(2.0)
    assert report.monotone()


@pytest.mark.parametrize("eps", [[], [0.1, 0.0], [0.05, 0.1]])
def test_levelset_rejects_eps(eps):
    grid = build_grid((0.0, 1.0, 0.0, 1.0), 11, 11)
    u = ScalarField.from_function(DomainMask.full(grid), lambda x, y: x)
    with pytest.raises(InvalidInputError):
        levelset_thickness(u, 0.5, eps)


def test_levelset_on_pair(disk_pair):
    rows = levelset_rows(disk_pair)

    assert [r.check for r in rows] == ["levelset_thickness"] * 5
    assert all(r.passed for r in rows)
    assert rows[-1].param == "slope"
    assert rows[-1].value > 0


def test_gradient_on_circle():
    grid = build_grid((-1.0, 1.0, -1.0, 1.0), 81, 81)
    field = ScalarField.from_function(DomainMask.full(grid), lambda x, y: x * x + y * y)
    result = gradient_on_contour(field, 0.25, tau=1e-3)

    assert result.passed
    assert result.singular_fraction == 0.0
    assert result.variation < 1e-2


def test_gradient_on_pair_boundary(disk_pair):
    result = gradient_on_boundary(disk_pair)

    assert result.passed
    assert result.min_grad > 0
    # u is radial, so the gradient barely varies along F
    assert result.variation < 0.1


def test_symmetry_check_on_disk(disk_pair):
    verdict = symmetry_singularity_check(disk_pair)

    assert verdict.passed
    assert verdict.n_components == 1
    assert verdict.closed
    assert verdict.reason == "ok"


def test_symmetry_check_rejects(disk_pair):
    with pytest.raises(InvalidInputError):
        symmetry_singularity_check(disk_pair, spec=make_domain("polygon", vertices=SQUARE))
    with pytest.raises(InvalidInputError):
        symmetry_singularity_check(disk_pair, spec=make_domain("disk", radius=0.8))


def test_symmetry_rows_skip_without_axes(disk_pair):
    pair = replace(disk_pair, spec=make_domain("polygon", vertices=SQUARE))
    rows = symmetry_rows(pair)

    assert len(rows) == 1
    assert rows[0].verdict == "skip"


def test_diagnostic_row_verdicts():
    assert DiagnosticRow("a", "p", 1.0, 0.1, True).verdict == "true"
    assert DiagnosticRow("a", "p", 1.0, 0.1, False).verdict == "false"
    assert DiagnosticRow("a", "p", 1.0, 0.1, None).to_dict()["pass"] == "skip"


def test_write_report(tmp_path):
    rows = [DiagnosticRow("pohozaev", "x0=0 0", 0.01, 0.03, True),
            DiagnosticRow("symmetry_singularity", "axes=0", math.nan, math.nan, None)]
    frame = read_csv(write_report(tmp_path / "diagnostics.csv", rows))

    assert list(frame.columns) == ["check", "param", "value", "tolerance", "pass"]
    assert frame["pass"].tolist() == ["true", "skip"]


def test_uniqueness_needs_seeds(disk_problem):
    spec, grid, omega = disk_problem
    with pytest.raises(InvalidInputError):
        weak_uniqueness_experiment(spec, grid, 4.0, 1.0, [])


@pytest.mark.slow
def test_weak_uniqueness():
    spec = make_domain("disk", radius=1.0)
    grid = build_grid((-1.1, 1.1, -1.1, 1.1), 41, 41)
    report = weak_uniqueness_experiment(spec, grid, 4.0, 1.5, [0, 1, 2], threads=2, slope_probe=0.05, tol=1e-8)

    assert len(report.runs) == 3
    assert report.optimal_seeds
    assert report.spread < 1e-2
    assert report.slope == pytest.approx(report.alpha_c2, rel=0.1)
    assert {row["seed"] for row in report.to_rows()} == {0, 1, 2}


@pytest.mark.slow
def test_ellipse_weak_uniqueness():
    spec = make_domain("ellipse", semi_axes=(2.0, 1.0))
    grid = RunConfig.from_dict({"grid.nx": 129, "grid.ny": 129}).grid(spec)
    A = 0.5 * rasterize_domain(spec, grid).measure
    report = weak_uniqueness_experiment(spec, grid, 10.0, A, [0, 1, 2, 3, 4], threads=2,
                                        tol=1e-8, eigen_tol=1e-10)

    assert len(report.runs) == 5
    assert report.optimal_seeds
    assert report.spread <= 1e-3


@pytest.mark.slow
@pytest.mark.parametrize("pair_fixture", ["ellipse_pair", "rectangle_pair"])
def test_symmetry_check_on_two_axis_shapes(pair_fixture, request):
    pair = request.getfixturevalue(pair_fixture)
    verdict = symmetry_singularity_check(pair)

    assert pair.spec.symmetry_axes == 2
    assert verdict.passed
    assert verdict.n_components == 1


@pytest.mark.slow
def test_run_all(disk_pair, tmp_path):
    rows = run_all(disk_pair, x0_list=[(0.0, 0.0), (0.2, 0.1)], seeds=[0], tol=1e-8)
    checks = [r.check for r in rows]

    assert checks[:2] == ["pohozaev", "pohozaev"]
    assert "weak_uniqueness" in checks
    assert checks[-1] == "symmetry_singularity"
    assert np.all([r.passed is not False for r in rows if r.check == "symmetry_singularity"])
    write_report(tmp_path / "diagnostics.csv", rows)
    assert (tmp_path / "diagnostics.csv").exists()
