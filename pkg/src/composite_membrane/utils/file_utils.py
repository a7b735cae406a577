"""
File and directory utilities: field dumps, manifests and PGM rasters.
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from PIL import Image

FIELD_FORMAT = "%.17g"


def ensure_directory(path: Union[str, Path]) -> Path:
    """Ensure a directory exists, creating it if necessary."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_field_dump(
    path: Union[str, Path],
    values: np.ndarray,
    bbox: Tuple[float, float, float, float],
    header: Optional[str] = None,
) -> Path:
    """
    Write a node field as a plain-text matrix.

    Line 1 is ``nx ny xmin xmax ymin ymax``; an optional extra header line
    (e.g. ``lambda residual iterations``) follows; then one row per ``j``.
    """
    path = Path(path)
    ensure_directory(path.parent)
    ny, nx = values.shape
    xmin, xmax, ymin, ymax = bbox
    lines = [f"{nx} {ny} {xmin!r} {xmax!r} {ymin!r} {ymax!r}"]
    if header is not None:
        lines.append(header)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
        np.savetxt(fh, values, fmt=FIELD_FORMAT)
    return path


def read_field_dump(
    path: Union[str, Path], extra_header: bool = False
) -> Tuple[np.ndarray, Tuple[float, float, float, float], Optional[str]]:
    """Read a dump written by :func:`write_field_dump`."""
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().split()
        header = fh.readline().strip() if extra_header else None
        values = np.loadtxt(fh, ndmin=2)
    nx, ny = int(first[0]), int(first[1])
    bbox = tuple(float(t) for t in first[2:6])
    if values.shape != (ny, nx):
        raise ValueError(f"{path}: expected {ny}x{nx} values, found {values.shape}")
    return values, bbox, header


def write_manifest(path: Union[str, Path], data: Dict[str, Any]) -> Path:
    """Write a JSON manifest with sorted keys (no timestamps)."""
    path = Path(path)
    ensure_directory(path.parent)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return path


def read_manifest(path: Union[str, Path]) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def write_pgm(path: Union[str, Path], values: np.ndarray) -> Dict[str, float]:
    """
    Write an 8-bit min-max scaled PGM raster, row 0 at the top.

    Returns the scale used so callers can record it in the manifest.
    """
    path = Path(path)
    ensure_directory(path.parent)
    vmin = float(np.min(values))
    vmax = float(np.max(values))
    span = vmax - vmin
    if span > 0:
        scaled = (values - vmin) / span * 255.0
    else:
        scaled = np.zeros_like(values, dtype=float)
    image = Image.fromarray(np.flipud(np.rint(scaled)).astype(np.uint8), mode="L")
    image.save(path, format="PPM")
    return {"min": vmin, "max": vmax}
