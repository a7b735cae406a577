"""
Tests for configuration management.
"""

import pytest

from composite_membrane.config import RunConfig, Settings, get_settings, load_run_config, update_settings
from composite_membrane.exceptions import ConfigError, InvalidInputError


def test_settings_defaults():
    settings = Settings()

    assert settings.tau == 1e-3
    assert settings.gamma == 0.5
    assert settings.band_cells == 10
    assert settings.threads == 1


def test_settings_env_override(monkeypatch, tmp_path):
    monkeypatch.setenv("MEMBRANE_THREADS", "3")
    monkeypatch.setenv("MEMBRANE_OUTPUT_DIR", str(tmp_path))
    settings = Settings()

    assert settings.threads == 3
    assert settings.output_dir == tmp_path


def test_settings_to_dict():
    settings_dict = Settings().to_dict()

    assert isinstance(settings_dict, dict)
    assert "output_dir" in settings_dict
    assert "eigen_tol" in settings_dict
    assert settings_dict["log_file"] is None


def test_get_settings_singleton():
    assert get_settings() is get_settings()


def test_update_settings():
    update_settings(tau=1e-2, threads=2)
    assert get_settings().tau == 1e-2
    assert get_settings().threads == 2

    with pytest.raises(ValueError):
        update_settings(no_such_setting=1)


def test_run_config_parsing():
    config = RunConfig.from_text(
        """
        # unit disk
        domain.shape = disk
        domain.radius = 1.5
        problem.alpha = 10   # trailing comment
        problem.A_fraction = 0.25
        run.seeds = 1, 2, 3
        diagnostics.x0_list = 0 0; 0.5 -0.5
        weiss.D = calibrated
        """
    )

    assert config.get("domain.radius") == 1.5
    assert config.get("problem.alpha") == 10.0
    assert config.get("run.seeds") == [1, 2, 3]
    assert config.get("diagnostics.x0_list") == [(0.0, 0.0), (0.5, -0.5)]
    assert config.get("weiss.D") == "calibrated"
    # schema default for an absent key
    assert config.get("grid.nx") == 128


def test_run_config_numeric_weiss_constant():
    assert RunConfig.from_text("weiss.D = 0.25").get("weiss.D") == 0.25


@pytest.mark.parametrize(
    "text",
    [
        "domain.colour = red",
        "problem.alpha = -1",
        "problem.A_fraction = 1.5",
        "grid.nx = two",
        "solver.init = spiral",
        "no equals sign here",
    ],
)
def test_run_config_rejects(text):
    with pytest.raises(ConfigError):
        RunConfig.from_text(text)


def test_config_error_names_key():
    with pytest.raises(ConfigError) as info:
        RunConfig.from_text("problem.alpha = -1")

    assert info.value.key == "problem.alpha"
    assert isinstance(info.value, InvalidInputError)


def test_with_overrides_and_hash():
    config = RunConfig.from_text("problem.alpha = 2")
    other = config.with_overrides(run__threads=4)

    assert other.get("run.threads") == 4
    assert config.get("run.threads") is None
    assert other.config_hash != config.config_hash
    assert RunConfig.from_text("problem.alpha = 2").config_hash == config.config_hash

    with pytest.raises(ConfigError):
        config.with_overrides(run__threads=0)


def test_grid_margin():
    config = RunConfig.from_text("domain.radius = 1\ngrid.nx = 21\ngrid.ny = 21\ngrid.margin_cells = 2")
    grid = config.grid()

    # two full cells between the shape and the grid edge
    assert grid.bbox[1] - 1.0 == pytest.approx(2 * grid.hx)
    assert grid.bbox[2] == pytest.approx(-grid.bbox[3])


@pytest.mark.parametrize(
    "entries, key",
    [
        ({"grid.nx": 5, "grid.ny": 5}, "grid.nx"),
        ({"grid.nx": 4, "grid.ny": 33}, "grid.nx"),
        ({"grid.nx": 33, "grid.ny": 5}, "grid.ny"),
        ({"grid.nx": 9, "grid.ny": 9, "grid.margin_cells": 4.0}, "grid.nx"),
    ],
)
def test_grid_margin_leaves_no_cells(entries, key):
    with pytest.raises(ConfigError) as info:
        RunConfig.from_dict(entries).grid()

    assert info.value.key == key


def test_grid_margin_smallest_grid():
    grid = RunConfig.from_dict({"grid.nx": 6, "grid.ny": 6}).grid()
    assert grid.nx == 6


def test_target_measure():
    assert RunConfig.from_text("problem.A = 1.2").target_measure(3.0) == 1.2
    assert RunConfig.from_text("problem.A_fraction = 0.25").target_measure(4.0) == 1.0
    assert RunConfig().target_measure(4.0) == 2.0


def test_measure_list_required():
    with pytest.raises(ConfigError):
        RunConfig().measure_list(1.0)


def test_polygon_needs_vertices():
    with pytest.raises(ConfigError):
        RunConfig.from_text("domain.shape = polygon").domain_spec()


def test_load_run_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("domain.shape = rectangle\ndomain.bounds = 0 2 0 1\n", encoding="utf-8")
    config = load_run_config(path)

    assert config.source == path
    assert config.domain_spec().area == pytest.approx(2.0)

    with pytest.raises(ConfigError):
        load_run_config(tmp_path / "missing.cfg")
