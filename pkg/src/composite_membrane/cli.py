"""
Command-line interface for the composite membrane package.
"""

import argparse
import functools
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from rich.console import Console
from rich.table import Table

from .config import RunConfig, get_settings, load_run_config, update_settings
from .diagnostics import run_all, write_report
from .exceptions import ConfigError, ConvergenceError, InvalidInputError, MembraneError, NoProfileError
from .freeboundary import (
    V_MINUS_CONVENTION,
    TwoPhaseField,
    blowup,
    c11_proxy,
    classify_points,
    extract_contour,
    field_gradient_max,
    geometric_radii,
    to_two_phase,
    weiss_profile,
)
from .freeboundary.blowup import CSV_COLUMNS as BLOWUP_COLUMNS
from .freeboundary.contour import CSV_COLUMNS as CONTOUR_COLUMNS
from .freeboundary.weiss import CSV_COLUMNS as WEISS_COLUMNS
from .geometry import ball_admissible, build_grid, rasterize_domain
from .homogeneous2d import (
    blank_profile,
    evaluate_field,
    exact_grid,
    halfplane,
    nonnegative,
    pde_residual,
    relative_spread,
    weiss_values,
)
from .optimizer import LambdaCurve, load_pair, optimize, save_pair, shape_derivative_residual, sweep
from .utils.data_utils import write_csv
from .utils.file_utils import ensure_directory, write_manifest, write_pgm
from .utils.logging import log_settings, setup_logging

logger = logging.getLogger(__name__)
console = Console()

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2

# run-config keys mirrored into the process-wide settings
_SETTINGS_KEYS = {
    "solver.eigen_tol": "eigen_tol",
    "solver.tol": "optimizer_tol",
    "solver.max_iter": "max_iter",
    "solver.damping": "damping",
    "solver.subsamples": "subsamples",
    "run.threads": "threads",
    "freeboundary.tau": "tau",
    "freeboundary.band_cells": "band_cells",
    "weiss.gamma": "gamma",
    "weiss.tol_W": "tol_W",
}


def create_parser() -> argparse.ArgumentParser:
    """Create the main argument parser."""
    parser = argparse.ArgumentParser(
        prog="composite-membrane",
        description="Composite membrane - eigenvalue optimization and free-boundary diagnostics",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Solve one configuration
  composite-membrane solve --config disk.cfg --out runs/disk

  # Lambda(A) sweep with the shape-derivative check
  composite-membrane sweep --config disk_sweep.cfg --threads 4

  # Diagnostics, Weiss profiles and blow-ups on a solved pair
  composite-membrane diagnose --pair-dir runs/disk
  composite-membrane weiss --pair-dir runs/disk
  composite-membrane blowup --pair-dir runs/disk

  # Exact homogeneous solutions
  composite-membrane exact --config halfplane.cfg
        """,
    )

    parser.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")
    parser.add_argument("--log-file", help="Log file path")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Run configuration file (key = value)")
    common.add_argument("--out", help="Output directory")
    common.add_argument("--seed", type=int, help="Seed overriding run.seeds")
    common.add_argument("--threads", type=int, help="Worker threads overriding run.threads")

    pair_source = argparse.ArgumentParser(add_help=False)
    pair_source.add_argument("--pair-dir", help="Directory written by 'solve'")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")
    subparsers.add_parser("solve", parents=[common], help="Compute one optimal pair")
    subparsers.add_parser("sweep", parents=[common], help="Lambda(A) curve over problem.A_list")
    subparsers.add_parser("diagnose", parents=[common, pair_source], help="Run the diagnostics report")
    subparsers.add_parser("weiss", parents=[common, pair_source], help="Weiss profiles at free-boundary points")
    subparsers.add_parser("blowup", parents=[common, pair_source], help="Blow-up sequence and degree-2 fits")
    subparsers.add_parser("exact", parents=[common], help="Exact homogeneous solution and Weiss constancy")
    return parser


def _guarded(handler: Callable[[argparse.Namespace], int]) -> Callable[[argparse.Namespace], int]:
    """Map package errors onto exit codes."""

    @functools.wraps(handler)
    def wrapper(args: argparse.Namespace) -> int:
        try:
            return handler(args)
        except InvalidInputError as e:
            console.print(f"[red]Error:[/red] {e}")
            logger.error("%s: %s", args.command, e)
            return EXIT_INPUT
        except (ConvergenceError, NoProfileError) as e:
            console.print(f"[red]Numerical failure:[/red] {e}")
            logger.error("%s: %s", args.command, e)
            return EXIT_NUMERICAL
        except MembraneError as e:
            console.print(f"[red]Failure:[/red] {e}")
            logger.error("%s: %s", args.command, e)
            return EXIT_NUMERICAL

    return wrapper


def _load_config(args: argparse.Namespace) -> RunConfig:
    config = load_run_config(args.config) if args.config else RunConfig()
    overrides: Dict[str, Any] = {}
    if args.seed is not None:
        overrides["run__seeds"] = [args.seed]
    if args.threads is not None:
        overrides["run__threads"] = args.threads
    if overrides:
        config = config.with_overrides(**overrides)
    settings = {name: config.values[key] for key, name in _SETTINGS_KEYS.items() if key in config.values}
    if settings:
        update_settings(**settings)
    log_settings(args.command)
    return config


def _output_dir(args: argparse.Namespace, config: RunConfig, command: str) -> Path:
    if args.out:
        return ensure_directory(args.out)
    configured = config.get("output.dir")
    if configured:
        return ensure_directory(configured)
    return ensure_directory(Path(get_settings().output_dir) / command)


def _manifest_extra(config: RunConfig, command: str) -> Dict[str, Any]:
    settings = get_settings()
    return {
        "command": command,
        "config_hash": config.config_hash,
        "config": config.normalized(),
        "tolerances": {
            "eigen_tol": settings.eigen_tol,
            "optimizer_tol": settings.optimizer_tol,
            "tol_W": settings.tol_W,
            "gamma": settings.gamma,
            "tau": settings.tau,
        },
        "v_minus_convention": V_MINUS_CONVENTION,
    }


def _print_table(title: str, entries: Dict[str, Any]) -> None:
    table = Table(title=title)
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for key, value in entries.items():
        table.add_row(key, f"{value:.10g}" if isinstance(value, float) else str(value))
    console.print(table)


def _problem(config: RunConfig):
    spec = config.domain_spec()
    grid = config.grid(spec)
    omega = rasterize_domain(spec, grid)
    return spec, grid, omega


def _optimize_kwargs() -> Dict[str, Any]:
    settings = get_settings()
    return {
        "tol": settings.optimizer_tol,
        "eigen_tol": settings.eigen_tol,
        "max_iter": settings.max_iter,
        "damping": settings.damping,
    }


def _pair_dir(args: argparse.Namespace, config: RunConfig) -> Path:
    if args.pair_dir:
        return Path(args.pair_dir)
    configured = config.get("output.dir")
    if configured:
        return Path(configured)
    return Path(get_settings().output_dir) / "solve"


@_guarded
def handle_solve(args: argparse.Namespace) -> int:
    """Handle the solve command."""
    config = _load_config(args)
    spec, grid, omega = _problem(config)
    A = config.target_measure(omega.measure)
    if not 0 < A < omega.measure:
        key = "problem.A" if "problem.A" in config.values else "problem.A_fraction"
        raise ConfigError(key, f"A={A!r} must lie strictly between 0 and |Omega|={omega.measure!r}")

    seed = config.get("run.seeds")[0]
    pair = optimize(spec, grid, config.get("problem.alpha"), A, init=config.get("solver.init"),
                    seed=seed, omega=omega, **_optimize_kwargs())
    out = _output_dir(args, config, "solve")
    manifest = save_pair(pair, out, manifest_extra=_manifest_extra(config, "solve"),
                         subsamples=get_settings().subsamples)
    v = np.where(omega.inside, pair.c - pair.u.values, 0.0)
    manifest["pgm_scale"]["v"] = write_pgm(out / "v.pgm", v)
    write_manifest(out / "manifest.json", manifest)

    _print_table("Optimal pair", pair.summary())
    if not pair.converged:
        console.print(f"[yellow]Not converged after {pair.iterations} iterations[/yellow]")
        return EXIT_NUMERICAL
    console.print(f"Pair written to {out}")
    return EXIT_OK


@_guarded
def handle_sweep(args: argparse.Namespace) -> int:
    """Handle the sweep command."""
    config = _load_config(args)
    spec, grid, omega = _problem(config)
    A_list = config.measure_list(omega.measure)
    curve: LambdaCurve = sweep(
        spec, grid, config.get("problem.alpha"), A_list,
        init=config.get("solver.init"),
        warm_start=bool(config.get("solver.warm_start")),
        threads=get_settings().threads,
        seed=config.get("run.seeds")[0],
        progress=True,
        **_optimize_kwargs(),
    )
    out = _output_dir(args, config, "sweep")
    write_csv(out / "curve.csv", curve.to_rows(), LambdaCurve.CSV_COLUMNS)

    manifest = {**_manifest_extra(config, "sweep"), "checks": curve.checks()}
    summary: Dict[str, Any] = dict(curve.checks())
    if len(curve.valid) >= 3:
        report = shape_derivative_residual(curve)
        write_csv(out / "shape_derivative.csv", report.to_rows(), ["A", "dLambda_dA", "alpha_c2", "residual"])
        manifest["shape_derivative"] = report.statistics
        summary["median residual"] = report.median
        summary["max residual"] = report.maximum
    else:
        logger.warning("fewer than three valid samples; shape-derivative residual skipped")
    write_manifest(out / "manifest.json", manifest)
    _print_table("Lambda(A) sweep", summary)

    if any(not s.ok or not s.converged for s in curve.samples):
        return EXIT_NUMERICAL
    return EXIT_OK


@_guarded
def handle_diagnose(args: argparse.Namespace) -> int:
    """Handle the diagnose command."""
    config = _load_config(args)
    pair_dir = _pair_dir(args, config)
    pair = load_pair(pair_dir)
    rows = run_all(
        pair,
        x0_list=config.get("diagnostics.x0_list"),
        seeds=config.get("run.seeds"),
        eps_list=config.get("diagnostics.eps_list"),
        tau=get_settings().tau,
        slope_probe=config.get("diagnostics.slope_probe"),
        threads=get_settings().threads,
        **_optimize_kwargs(),
    )
    out = ensure_directory(args.out) if args.out else pair_dir
    write_report(out / "diagnostics.csv", rows)
    try:
        contour = extract_contour(pair.u, pair.c)
        write_csv(out / "contour.csv", contour.to_rows(), CONTOUR_COLUMNS)
    except MembraneError as e:
        logger.warning("contour not written: %s", e)
    write_manifest(out / "diagnostics_manifest.json", _manifest_extra(config, "diagnose"))

    table = Table(title="Diagnostics")
    for column in ("check", "param", "value", "tolerance", "pass"):
        table.add_column(column)
    for row in rows:
        table.add_row(row.check, row.param, f"{row.value:.6g}", f"{row.tolerance:.3g}", row.verdict)
    console.print(table)
    return EXIT_OK


def _free_boundary_centers(tp: TwoPhaseField, count: int) -> List[Tuple[float, float]]:
    """``count`` regular vertices of ``{v = 0}``, evenly spaced along the contour."""
    contour = extract_contour(tp.v, 0.0)
    regular, _ = classify_points(contour, field_gradient_max(tp.v))
    points = regular if len(regular) else contour.points
    picks = np.unique(np.linspace(0, len(points), count, endpoint=False).astype(int))
    return [(float(points[k, 0]), float(points[k, 1])) for k in picks]


def _admissible_radii(tp: TwoPhaseField, x0, radii: Sequence[float]) -> List[float]:
    kept = [float(r) for r in radii if ball_admissible(tp.mask, x0, r)]
    if len(kept) < len(radii):
        logger.warning("centre (%.4g, %.4g): %d of %d radii clipped to admissible balls",
                       x0[0], x0[1], len(radii) - len(kept), len(radii))
    return kept


@_guarded
def handle_weiss(args: argparse.Namespace) -> int:
    """Handle the weiss command."""
    config = _load_config(args)
    pair = load_pair(_pair_dir(args, config))
    tp = to_two_phase(pair)
    h = tp.grid.h
    r_min, r_max, count = config.get("weiss.radii_cells")
    radii = np.linspace(r_min * h, r_max * h, int(count))
    out = _output_dir(args, config, "weiss")

    summary_rows = []
    for k, x0 in enumerate(_free_boundary_centers(tp, config.get("weiss.centers"))):
        kept = _admissible_radii(tp, x0, radii)
        if len(kept) < 2:
            logger.warning("centre (%.4g, %.4g) skipped: fewer than two admissible radii", *x0)
            continue
        profile = weiss_profile(tp, x0, kept, D=config.get("weiss.D"), mode=config.get("weiss.mode"))
        write_csv(out / f"weiss_{k}.csv", profile.to_rows(), WEISS_COLUMNS)
        summary_rows.append({
            "center": k, "x": x0[0], "y": x0[1], "D": profile.D,
            "monotone": int(profile.monotone), "s0": profile.s0,
            "c11_proxy": c11_proxy(tp, x0, kept[-1]),
        })
    if not summary_rows:
        raise InvalidInputError("no free-boundary centre admits two Weiss radii; refine the grid")
    write_csv(out / "weiss_summary.csv", summary_rows,
              ["center", "x", "y", "D", "monotone", "s0", "c11_proxy"])
    write_manifest(out / "manifest.json", {
        **_manifest_extra(config, "weiss"),
        "equation_residual": tp.equation_residual,
        "eta0": tp.eta0,
        "band_width": tp.band_width,
    })

    table = Table(title="Weiss profiles")
    for column in ("center", "x", "y", "D", "monotone", "s0"):
        table.add_column(column)
    for row in summary_rows:
        table.add_row(str(row["center"]), f"{row['x']:.4g}", f"{row['y']:.4g}", f"{row['D']:.4g}",
                      "yes" if row["monotone"] else "no", f"{row['s0']:.4g}")
    console.print(table)
    return EXIT_OK


def _quartic(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x ** 4 - 6 * x ** 2 * y ** 2 + y ** 4


def _exact_solution(config: RunConfig, kind: str):
    f0 = config.get("exact.f0")
    g0 = config.values.get("exact.g0")
    if kind == "halfplane":
        return halfplane(f0, g0)
    if kind == "nonnegative":
        return nonnegative(f0, config.get("exact.a"), g0)
    return blank_profile(f0, config.get("exact.g0"), threads=get_settings().threads)


def _blowup_source(args: argparse.Namespace, config: RunConfig) -> Tuple[TwoPhaseField, Tuple[float, float]]:
    source = config.get("blowup.source")
    if source == "pair":
        tp = to_two_phase(load_pair(_pair_dir(args, config)))
        contour = extract_contour(tp.v, 0.0)
        k = int(np.argmin(contour.grad_norm))
        return tp, tuple(map(float, contour.points[k]))
    grid = build_grid((-1.0, 1.0, -1.0, 1.0), config.get("exact.n"), config.get("exact.n"))
    if source == "quartic":
        return TwoPhaseField.from_functions(grid, _quartic, 1.0, -1.0), (0.0, 0.0)
    sol = _exact_solution(config, source)
    return TwoPhaseField.synthetic(evaluate_field(sol, grid), sol.f0, sol.g0), (0.0, 0.0)


@_guarded
def handle_blowup(args: argparse.Namespace) -> int:
    """Handle the blowup command."""
    config = _load_config(args)
    tp, x0 = _blowup_source(args, config)
    radii = geometric_radii(config.get("blowup.r_max_cells") * tp.grid.h, config.get("blowup.levels"))
    radii = _admissible_radii(tp, x0, radii)
    if len(radii) < 2:
        raise InvalidInputError("fewer than two admissible blow-up radii; lower blowup.r_max_cells")
    sequence = blowup(tp, x0, radii)

    out = _output_dir(args, config, "blowup")
    write_csv(out / "blowup.csv", sequence.to_rows(), BLOWUP_COLUMNS)
    write_pgm(out / "blowup_last.pgm", sequence.levels[-1].field.values)
    summary = {
        "x0": f"({x0[0]:.6g}, {x0[1]:.6g})",
        "regime": sequence.regime,
        "trend": sequence.trend(),
        "singular_center": sequence.singular_center,
        "max_level_difference": sequence.max_level_difference(),
        "c11_proxy": c11_proxy(tp, x0, radii[0]),
    }
    write_manifest(out / "manifest.json", {**_manifest_extra(config, "blowup"), **summary})
    _print_table("Blow-up", summary)
    return EXIT_OK


@_guarded
def handle_exact(args: argparse.Namespace) -> int:
    """Handle the exact command."""
    config = _load_config(args)
    kind = config.get("exact.kind")
    sol = _exact_solution(config, kind)
    radii = config.get("exact.radii")
    n = config.get("exact.n")
    W = weiss_values(sol, radii, n)
    spread = relative_spread(W)
    residual = pde_residual(sol, exact_grid(radii, n))

    out = _output_dir(args, config, "exact")
    (out / "solution.txt").write_text(sol.to_text(), encoding="utf-8")
    write_csv(out / "weiss.csv", [{"r": r, "W": w} for r, w in zip(radii, W)], ["r", "W"])
    summary = {"kind": kind, "weiss_spread": spread, "W_mean": float(np.mean(W)), "pde_residual": residual}
    if kind == "halfplane":
        summary["W_expected"] = math.pi * sol.f0 ** 2 / 8
    summary.update({k: v for k, v in sol.checks.items()})
    write_manifest(out / "manifest.json", {**_manifest_extra(config, "exact"), **summary})

    console.print(sol.to_text())
    _print_table("Weiss constancy", summary)
    return EXIT_OK


HANDLERS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "solve": handle_solve,
    "sweep": handle_sweep,
    "diagnose": handle_diagnose,
    "weiss": handle_weiss,
    "blowup": handle_blowup,
    "exact": handle_exact,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point."""
    parser = create_parser()
    args = parser.parse_args(argv)

    setup_logging(
        level="DEBUG" if args.verbose else None,
        log_file=Path(args.log_file) if args.log_file else None,
    )

    handler = HANDLERS.get(args.command)
    if handler is None:
        parser.print_help()
        return EXIT_INPUT
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
