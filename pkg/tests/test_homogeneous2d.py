"""
Tests for the exact homogeneous solutions.
"""

import math

import numpy as np
import pytest

from composite_membrane.exceptions import InvalidInputError, NoProfileError
from composite_membrane.homogeneous2d import (
    EXISTENCE_RATIO,
    HomogeneousSolution2D,
    SolutionKind,
    amplitudes,
    blank_profile,
    evaluate,
    exact_grid,
    halfplane,
    matching_residuals,
    nonnegative,
    pde_residual,
    relative_spread,
    weiss_constancy,
    weiss_values,
)

THREEFOLD = 2 * math.pi / 3


@pytest.fixture(scope="module")
def blank():
    return blank_profile(1.0, -20.0)


def test_halfplane_values():
    sol = halfplane(2.0)

    assert sol.g0 == -4.0
    assert evaluate(sol, np.array([[1.0, 5.0], [-0.5, 0.0]])) == pytest.approx([1.0, 0.25])


def test_coefficient_checks():
    with pytest.raises(InvalidInputError):
        halfplane(-1.0)
    with pytest.raises(InvalidInputError):
        halfplane(1.0, g0=-0.5)
    with pytest.raises(InvalidInputError):
        halfplane(1.0, g0=1.0)
    with pytest.raises(InvalidInputError):
        nonnegative(1.0, 0.3)


def test_nonnegative_solves_equation():
    sol = nonnegative(1.0, 0.1)
    grid = exact_grid([0.5], 64)

    assert np.all(sol(*grid.coords) >= 0)
    assert pde_residual(sol, grid) < 1e-8


def test_exact_grid():
    grid = exact_grid([0.2, 0.5], 64)
    assert grid.bbox == pytest.approx((-0.6, 0.6, -0.6, 0.6))


def test_halfplane_weiss_constancy():
    sol = halfplane(1.0)
    radii = [0.1, 0.2, 0.3, 0.4, 0.5]
    W = weiss_values(sol, radii, 256)

    assert np.mean(W) == pytest.approx(math.pi / 8, rel=5e-3)
    assert weiss_constancy(sol, radii, 256) < 5e-3


def test_weiss_values_rejects_radii():
    with pytest.raises(InvalidInputError):
        weiss_values(halfplane(1.0), [0.0, 0.1], 64)


def test_relative_spread():
    assert relative_spread([2.0, 2.0]) == 0.0
    assert relative_spread([1.0, 3.0]) == pytest.approx(1.0)
    assert relative_spread([-1.0, 1.0]) == pytest.approx(2.0)


def test_amplitudes():
    assert amplitudes(1.0, -20.0) == (0.25, 5.0)


def test_existence_ratio():
    assert EXISTENCE_RATIO == pytest.approx(13.928203230275509)


def test_blank_profile_parameters(blank):
    assert blank.kind is SolutionKind.BLANK
    assert 0 < blank.theta0 < THREEFOLD
    assert blank.C_plus > 0
    assert blank.C_minus > 0
    assert -math.pi < blank.D_plus <= math.pi
    x = np.array([blank.C_plus, blank.D_plus, blank.C_minus, blank.D_minus, blank.theta0])
    assert np.max(np.abs(matching_residuals(x, blank.gamma, blank.mu))) < 1e-10
    for name in ("identity_squares", "identity_zero", "identity_theta0"):
        assert blank.checks[name] <= 1e-10
    assert blank.checks["junction_theta0"] <= 1e-8
    assert blank.checks["junction_wrap"] <= 1e-8


def test_blank_profile_signs(blank):
    positive = np.linspace(0.0, blank.theta0, 50)[1:-1]
    negative = np.linspace(blank.theta0, THREEFOLD, 50)[1:-1]

    assert np.all(blank.angular(positive) > 0)
    assert np.all(blank.angular(negative) < 0)
    # continuity across the junction and the wrap
    assert blank.angular(blank.theta0 - 1e-9) == pytest.approx(blank.angular(blank.theta0 + 1e-9), abs=1e-7)
    assert blank.angular(THREEFOLD - 1e-9) == pytest.approx(blank.angular(1e-9), abs=1e-7)


def test_blank_threefold_symmetry(blank):
    theta = np.linspace(-math.pi, math.pi, 37)
    assert np.allclose(blank.angular(theta), blank.angular(theta + THREEFOLD))


def test_blank_solves_equation(blank):
    assert pde_residual(blank, exact_grid([0.5], 128)) < 1e-6


@pytest.mark.slow
def test_blank_weiss_constancy(blank):
    assert weiss_constancy(blank, [0.1, 0.2, 0.3, 0.4, 0.5], 512) < 1e-2


def test_blank_profile_below_threshold():
    with pytest.raises(NoProfileError) as info:
        blank_profile(1.0, -1.5)
    assert "threshold" in str(info.value)


def test_blank_profile_rejects_coefficients():
    with pytest.raises(InvalidInputError):
        blank_profile(1.0, -0.5)


def test_solution_text(blank):
    restored = HomogeneousSolution2D.from_text(blank.to_text())

    assert restored.kind is SolutionKind.BLANK
    assert restored.theta0 == blank.theta0
    assert restored.C_minus == blank.C_minus
    assert math.isnan(restored.a)
    with pytest.raises(InvalidInputError):
        HomogeneousSolution2D.from_text("kind = blank\nf0 = 1.0\n")
