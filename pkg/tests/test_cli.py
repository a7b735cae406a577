"""
Tests for the command-line interface.
"""

import pytest

from composite_membrane.cli import EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK, create_parser, main
from composite_membrane.utils import read_csv, read_manifest

SMALL_DISK = """
domain.shape = disk
domain.radius = 1.0
grid.nx = 41
grid.ny = 41
problem.alpha = 4.0
problem.A_fraction = 0.5
solver.tol = 1e-8
"""


def write_config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_parser_commands():
    parser = create_parser()
    args = parser.parse_args(["blowup", "--pair-dir", "out/solve", "--seed", "3"])

    assert args.command == "blowup"
    assert args.pair_dir == "out/solve"
    assert args.seed == 3


def test_no_command():
    assert main([]) == EXIT_INPUT


def test_unknown_config_key(tmp_path):
    config = write_config(tmp_path, "problem.beta = 1\n")
    assert main(["exact", "--config", config, "--out", str(tmp_path / "out")]) == EXIT_INPUT


def test_grid_too_small_for_margin(tmp_path):
    config = write_config(tmp_path, "grid.nx = 5\ngrid.ny = 5\n")
    assert main(["solve", "--config", config, "--out", str(tmp_path / "out")]) == EXIT_INPUT


def test_missing_config_file(tmp_path):
    assert main(["exact", "--config", str(tmp_path / "absent.cfg")]) == EXIT_INPUT


def test_exact_halfplane(tmp_path):
    config = write_config(tmp_path, "exact.kind = halfplane\nexact.n = 64\n")
    out = tmp_path / "exact"

    assert main(["exact", "--config", config, "--out", str(out)]) == EXIT_OK
    for name in ("solution.txt", "weiss.csv", "manifest.json"):
        assert (out / name).exists()
    manifest = read_manifest(out / "manifest.json")
    assert manifest["command"] == "exact"
    assert manifest["W_mean"] > 0
    assert "weiss_spread" in manifest
    assert len(read_csv(out / "weiss.csv")) == 5


def test_exact_blank(tmp_path):
    config = write_config(tmp_path, "exact.kind = blank\nexact.g0 = -20\nexact.n = 64\n")
    assert main(["exact", "--config", config, "--out", str(tmp_path / "blank")]) == EXIT_OK


def test_exact_blank_below_threshold(tmp_path):
    config = write_config(tmp_path, "exact.kind = blank\nexact.g0 = -1.5\nexact.n = 64\n")
    assert main(["exact", "--config", config, "--out", str(tmp_path / "blank")]) == EXIT_NUMERICAL


def test_blowup_halfplane(tmp_path):
    config = write_config(
        tmp_path,
        "blowup.source = halfplane\nexact.n = 129\nblowup.r_max_cells = 32\nblowup.levels = 3\n",
    )
    out = tmp_path / "blowup"

    assert main(["blowup", "--config", config, "--out", str(out)]) == EXIT_OK
    frame = read_csv(out / "blowup.csv")
    assert len(frame) == 3
    assert (out / "blowup_last.pgm").exists()
    assert read_manifest(out / "manifest.json")["regime"] == "homogeneous-solution"


@pytest.mark.slow
@pytest.mark.integration
def test_solve_then_diagnose(tmp_path):
    config = write_config(tmp_path, SMALL_DISK)
    pair_dir = tmp_path / "solve"

    code = main(["solve", "--config", config, "--out", str(pair_dir)])
    assert code in (EXIT_OK, EXIT_NUMERICAL)
    for name in ("u.txt", "D.txt", "history.csv", "u.pgm", "D.pgm", "v.pgm", "manifest.json"):
        assert (pair_dir / name).exists()
    assert "v_minus_convention" in read_manifest(pair_dir / "manifest.json")

    diag_dir = tmp_path / "diagnose"
    assert main(["diagnose", "--config", config, "--pair-dir", str(pair_dir), "--out", str(diag_dir)]) == EXIT_OK
    report = read_csv(diag_dir / "diagnostics.csv")
    assert list(report.columns) == ["check", "param", "value", "tolerance", "pass"]
    assert set(report["check"]) >= {"pohozaev", "weak_uniqueness", "levelset_thickness"}
    assert (diag_dir / "diagnostics_manifest.json").exists()


@pytest.mark.slow
@pytest.mark.integration
def test_solve_then_weiss(tmp_path):
    config = write_config(tmp_path, SMALL_DISK + "weiss.radii_cells = 2 4 3\nweiss.centers = 2\n")
    pair_dir = tmp_path / "solve"
    main(["solve", "--config", config, "--out", str(pair_dir)])

    out = tmp_path / "weiss"
    assert main(["weiss", "--config", config, "--pair-dir", str(pair_dir), "--out", str(out)]) == EXIT_OK
    summary = read_csv(out / "weiss_summary.csv")
    assert len(summary) >= 1
    assert (summary["D"] >= 0).all()


def test_sweep_needs_measure_list(tmp_path):
    config = write_config(tmp_path, SMALL_DISK)
    assert main(["sweep", "--config", config, "--out", str(tmp_path / "sweep")]) == EXIT_INPUT


@pytest.mark.slow
@pytest.mark.integration
def test_sweep(tmp_path):
    config = write_config(tmp_path, SMALL_DISK + "problem.A_list = 1.0 1.4 1.8\n")
    out = tmp_path / "sweep"

    code = main(["sweep", "--config", config, "--out", str(out)])
    assert code in (EXIT_OK, EXIT_NUMERICAL)
    curve = read_csv(out / "curve.csv")
    assert curve["A"].tolist() == pytest.approx([1.0, 1.4, 1.8])
    if code == EXIT_OK:
        assert (out / "shape_derivative.csv").exists()
    assert "checks" in read_manifest(out / "manifest.json")
