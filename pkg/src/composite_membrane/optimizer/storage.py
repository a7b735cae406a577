"""
Saving and loading optimal pairs as field dumps plus a manifest.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from ..exceptions import InvalidInputError
from ..geometry import DomainMask, ScalarField, build_grid, make_domain, rasterize_domain
from ..utils.data_utils import read_csv, write_csv
from ..utils.file_utils import (
    ensure_directory,
    read_field_dump,
    read_manifest,
    write_field_dump,
    write_manifest,
    write_pgm,
)
from .models import InitKind, IterationRecord, OptimalPair

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"
U_DUMP = "u.txt"
D_DUMP = "D.txt"
HISTORY_CSV = "history.csv"
HISTORY_COLUMNS = ["iteration", "Lambda", "c", "symdiff", "eigen_iterations"]


def save_pair(
    pair: OptimalPair,
    out_dir: Union[str, Path],
    manifest_extra: Optional[Dict[str, Any]] = None,
    subsamples: Optional[int] = None,
) -> Dict[str, Any]:
    """
    Write ``u.txt`` (with the eigen header line), ``D.txt`` (cell weights of D),
    ``history.csv``, PGM rasters of u and D, and ``manifest.json``.
    """
    out = ensure_directory(out_dir)
    bbox = pair.grid.bbox
    header = f"{pair.lam!r} {pair.eigen_residual!r} {pair.eigen_iterations}"
    write_field_dump(out / U_DUMP, pair.u.values, bbox, header=header)
    write_field_dump(out / D_DUMP, pair.D.weights, bbox)
    write_csv(out / HISTORY_CSV, [rec.to_dict() for rec in pair.history], HISTORY_COLUMNS)
    scales = {
        "u": write_pgm(out / "u.pgm", pair.u.values),
        "D": write_pgm(out / "D.pgm", pair.D.fraction_of(pair.omega)),
    }
    manifest = {
        **pair.summary(),
        "domain": pair.spec.to_dict(),
        "grid": pair.grid.to_dict(),
        "subsamples": subsamples,
        "pgm_scale": scales,
        "files": {"u": U_DUMP, "D": D_DUMP, "history": HISTORY_CSV},
    }
    manifest.update(manifest_extra or {})
    write_manifest(out / MANIFEST, manifest)
    logger.info("Pair written to %s", out)
    return manifest


def _domain_from_manifest(entry: Dict[str, Any]):
    params = {k: v for k, v in entry.items() if k != "shape"}
    for key in ("bounds", "semi_axes"):
        if key in params:
            params[key] = tuple(params[key])
    if "vertices" in params:
        params["vertices"] = tuple(tuple(p) for p in params["vertices"])
    return make_domain(entry["shape"], **params)


def load_pair(out_dir: Union[str, Path]) -> OptimalPair:
    """Rebuild an OptimalPair from a directory written by :func:`save_pair`."""
    out = Path(out_dir)
    if not (out / MANIFEST).exists():
        raise InvalidInputError(f"no {MANIFEST} in {out}")
    manifest = read_manifest(out / MANIFEST)
    spec = _domain_from_manifest(manifest["domain"])
    g = manifest["grid"]
    grid = build_grid(tuple(g["bbox"]), g["nx"], g["ny"])
    omega = rasterize_domain(spec, grid, subsamples=manifest.get("subsamples"))

    u_values, u_bbox, header = read_field_dump(out / U_DUMP, extra_header=True)
    d_weights, _, _ = read_field_dump(out / D_DUMP)
    if u_values.shape != grid.shape or not np.allclose(u_bbox, grid.bbox):
        raise InvalidInputError(f"{out / U_DUMP} does not match the manifest grid")
    lam, residual, _ = header.split()

    history = []
    history_path = out / HISTORY_CSV
    if history_path.exists():
        frame = read_csv(history_path)
        history = [
            IterationRecord(int(row.iteration), float(row.Lambda), float(row.c),
                            float(row.symdiff), int(row.eigen_iterations))
            for row in frame.itertuples(index=False)
        ]

    return OptimalPair(
        spec=spec,
        omega=omega,
        u=ScalarField(omega, u_values),
        D=DomainMask(grid, d_weights > 0, d_weights),
        c=float(manifest["c"]),
        lam=float(lam),
        alpha=float(manifest["alpha"]),
        A=float(manifest["A"]),
        history=history,
        converged=bool(manifest["converged"]),
        init=InitKind(manifest.get("init", "annulus")),
        seed=manifest.get("seed"),
        eigen_residual=float(residual),
    )
