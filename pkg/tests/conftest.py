"""
Shared fixtures: fresh settings per test and small solved pairs.
"""

import math

import pytest

from composite_membrane.config import RunConfig
from composite_membrane.config import settings as settings_module
from composite_membrane.geometry import build_grid, make_domain, rasterize_domain
from composite_membrane.optimizer import optimize


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test starts from the default settings."""
    for name in ("MEMBRANE_LOG_LEVEL", "MEMBRANE_OUTPUT_DIR", "MEMBRANE_LOG_FILE", "MEMBRANE_THREADS"):
        monkeypatch.delenv(name, raising=False)
    settings_module._settings = None
    yield
    settings_module._settings = None


@pytest.fixture(scope="session")
def disk_problem():
    spec = make_domain("disk", center=(0.0, 0.0), radius=1.0)
    grid = build_grid((-1.1, 1.1, -1.1, 1.1), 61, 61)
    omega = rasterize_domain(spec, grid)
    return spec, grid, omega


@pytest.fixture(scope="session")
def disk_pair(disk_problem):
    """Optimal pair on the unit disk with alpha = 4 and half the area in D."""
    spec, grid, omega = disk_problem
    return optimize(spec, grid, 4.0, 0.5 * omega.measure, omega=omega, tol=1e-8, eigen_tol=1e-10)


def solve_half_area(spec, n=129, alpha=10.0):
    """Optimal pair with half the area in D on an n x n grid with the default margin."""
    grid = RunConfig.from_dict({"grid.nx": n, "grid.ny": n}).grid(spec)
    omega = rasterize_domain(spec, grid)
    return optimize(spec, grid, alpha, 0.5 * omega.measure, omega=omega, tol=1e-8, eigen_tol=1e-10)


@pytest.fixture(scope="session")
def ellipse_pair():
    return solve_half_area(make_domain("ellipse", semi_axes=(2.0, 1.0)))


@pytest.fixture(scope="session")
def rectangle_pair():
    return solve_half_area(make_domain("rectangle", bounds=(-1.0, 1.0, -0.5, 0.5)))


@pytest.fixture
def unit_disk_area():
    return math.pi
