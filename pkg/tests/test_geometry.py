"""
Tests for grids, domains, fields and quadrature.
"""

import math

import numpy as np
import pytest

from composite_membrane.exceptions import InvalidInputError
from composite_membrane.geometry import (
    DomainMask,
    ScalarField,
    ball_admissible,
    build_grid,
    circle_integral,
    disk_integral,
    gradient,
    laplacian_5pt,
    make_domain,
    quantile_weights,
    rasterize_domain,
    weighted_quantile,
)


def test_grid_spacing_and_coords():
    grid = build_grid((0.0, 2.0, 0.0, 1.0), 21, 11)

    assert grid.hx == pytest.approx(0.1)
    assert grid.hy == pytest.approx(0.1)
    assert grid.shape == (11, 21)
    X, Y = grid.coords
    assert X.shape == grid.shape
    assert X[0, -1] == pytest.approx(2.0)
    assert Y[-1, 0] == pytest.approx(1.0)


@pytest.mark.parametrize("bbox,nx", [((0.0, 1.0, 0.0, 1.0), 2), ((1.0, 0.0, 0.0, 1.0), 5), ((0.0, 1.0), 5)])
def test_grid_rejects(bbox, nx):
    with pytest.raises(InvalidInputError):
        build_grid(bbox, nx, 5)


def test_make_domain_unknown_shape():
    with pytest.raises(InvalidInputError):
        make_domain("hexagon")


def test_domain_validation():
    with pytest.raises(InvalidInputError):
        make_domain("disk", radius=-1.0)
    with pytest.raises(InvalidInputError):
        make_domain("polygon", vertices=((0.0, 0.0), (1.0, 0.0)))
    # a scalene triangle has no mirror axis
    with pytest.raises(InvalidInputError):
        make_domain("polygon", vertices=((0.0, 0.0), (2.0, 0.0), (0.0, 1.0)), symmetry_axes=2)


def test_boundary_samples_perimeter():
    disk = make_domain("disk", radius=2.0)
    rect = make_domain("rectangle", bounds=(0.0, 2.0, 0.0, 1.0))

    assert disk.boundary_samples(0.05).length == pytest.approx(4 * math.pi)
    samples = rect.boundary_samples(0.05)
    assert samples.length == pytest.approx(6.0)
    assert np.allclose(np.hypot(samples.normals[:, 0], samples.normals[:, 1]), 1.0)


def test_rasterize_disk_measure():
    spec = make_domain("disk", radius=1.0)
    omega = rasterize_domain(spec, build_grid((-1.1, 1.1, -1.1, 1.1), 61, 61))

    assert omega.measure == pytest.approx(math.pi, rel=1e-2)
    assert not omega.inside[0].any()
    assert not omega.inside[:, -1].any()
    assert omega.edge_fraction is not None
    assert omega.edge_fraction.min() > 0


def test_rasterize_rectangle_measure():
    spec = make_domain("rectangle", bounds=(0.0, 1.0, 0.0, 1.0))
    omega = rasterize_domain(spec, build_grid((-0.1, 1.1, -0.1, 1.1), 25, 25))

    assert omega.measure == pytest.approx(1.0, rel=1e-6)


def test_rasterize_outside_bbox():
    spec = make_domain("disk", radius=1.0)
    with pytest.raises(InvalidInputError):
        rasterize_domain(spec, build_grid((-0.5, 0.5, -0.5, 0.5), 11, 11))


def test_full_mask_weights():
    grid = build_grid((0.0, 1.0, 0.0, 1.0), 11, 11)
    full = DomainMask.full(grid)

    assert full.measure == pytest.approx(1.0)
    assert full.inside.all()


def test_quantile_weights_fractional_cell():
    level, admitted = quantile_weights(np.array([3.0, 1.0, 2.0, 4.0]), np.ones(4), 2.5)

    assert level == 3.0
    assert np.allclose(admitted, [0.5, 1.0, 1.0, 0.0])


def test_quantile_weights_ties_follow_position():
    _, admitted = quantile_weights(np.ones(3), np.ones(3), 1.5)
    assert np.allclose(admitted, [1.0, 0.5, 0.0])


def test_quantile_weights_out_of_range():
    with pytest.raises(InvalidInputError):
        quantile_weights(np.ones(3), np.ones(3), 4.0)
    with pytest.raises(InvalidInputError):
        quantile_weights(np.ones(3), np.zeros(3), 1.0)


def test_weighted_quantile_measure():
    spec = make_domain("disk", radius=1.0)
    omega = rasterize_domain(spec, build_grid((-1.1, 1.1, -1.1, 1.1), 41, 41))
    X, Y = omega.grid.coords
    u = ScalarField(omega, np.hypot(X, Y))
    c, D = weighted_quantile(u, omega, 1.0)

    assert D.measure == pytest.approx(1.0)
    # D takes the smallest values first
    assert np.all(u.values[D.support & (D.weights == omega.weights)] <= c)


def test_disk_integral_quadratics():
    grid = build_grid((-1.0, 1.0, -1.0, 1.0), 101, 101)
    full = DomainMask.full(grid)
    one = ScalarField(full, np.ones(grid.shape))
    r2 = ScalarField.from_function(full, lambda x, y: x * x + y * y)

    assert disk_integral(one, (0.0, 0.0), 0.5) == pytest.approx(math.pi * 0.25, rel=1e-3)
    assert disk_integral(r2, (0.1, -0.2), 0.5) == pytest.approx(
        math.pi * 0.5 ** 4 / 2 + math.pi * 0.25 * 0.05, rel=1e-3
    )


def test_disk_integral_requires_admissible_ball():
    grid = build_grid((-1.0, 1.0, -1.0, 1.0), 41, 41)
    field = ScalarField(DomainMask.full(grid), np.ones(grid.shape))

    with pytest.raises(InvalidInputError):
        disk_integral(field, (0.9, 0.0), 0.5)
    with pytest.raises(InvalidInputError):
        disk_integral(field, (0.0, 0.0), 0.0)


def test_circle_integral():
    grid = build_grid((-1.0, 1.0, -1.0, 1.0), 81, 81)
    full = DomainMask.full(grid)
    one = ScalarField(full, np.ones(grid.shape))
    x2 = ScalarField.from_function(full, lambda x, y: x * x)

    assert circle_integral(one, (0.0, 0.0), 0.4) == pytest.approx(2 * math.pi * 0.4)
    assert circle_integral(x2, (0.0, 0.0), 0.4) == pytest.approx(math.pi * 0.4 ** 3, rel=1e-6)


def test_ball_admissible():
    spec = make_domain("disk", radius=1.0)
    omega = rasterize_domain(spec, build_grid((-1.1, 1.1, -1.1, 1.1), 61, 61))

    assert ball_admissible(omega, (0.0, 0.0), 0.5)
    assert not ball_admissible(omega, (0.0, 0.0), 0.99)
    assert not ball_admissible(omega, (0.8, 0.0), 0.3)


def test_gradient_exact_for_linear():
    spec = make_domain("disk", radius=1.0)
    omega = rasterize_domain(spec, build_grid((-1.1, 1.1, -1.1, 1.1), 41, 41))
    u = ScalarField.from_function(omega, lambda x, y: 2 * x - 3 * y)
    gx, gy = gradient(u)

    assert np.allclose(gx.inside_values(), 2.0)
    assert np.allclose(gy.inside_values(), -3.0)


def test_laplacian_5pt():
    grid = build_grid((-1.0, 1.0, -1.0, 1.0), 21, 21)
    X, Y = grid.coords
    lap = laplacian_5pt(X ** 2 + 3 * Y ** 2, grid)

    assert np.isnan(lap[0]).all()
    assert np.allclose(lap[1:-1, 1:-1], 8.0)


@pytest.mark.parametrize(
    "shape, params",
    [
        ("ellipse", {"semi_axes": (2.0, 1.0)}),
        ("stadium", {"half_length": 1.0, "radius": 0.5}),
    ],
)
def test_rasterize_curved_shapes(shape, params):
    spec = make_domain(shape, **params)
    xmin, xmax, ymin, ymax = spec.bbox
    grid = build_grid((xmin - 0.1, xmax + 0.1, ymin - 0.1, ymax + 0.1), 161, 101)
    omega = rasterize_domain(spec, grid)

    assert omega.measure == pytest.approx(spec.area, rel=1e-2)
    assert spec.symmetry_axes == 2
