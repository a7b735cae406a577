"""
Data processing utilities.
"""

from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .file_utils import FIELD_FORMAT, ensure_directory


def calculate_statistics(values: Iterable[float]) -> Dict[str, Any]:
    """Count/mean/median/min/max of finite values; ``None`` entries for empty input."""
    series = pd.Series(list(values), dtype=float)
    series = series[np.isfinite(series)]
    if series.empty:
        return {"count": 0, "mean": None, "median": None, "min": None, "max": None}
    return {
        "count": int(series.size),
        "mean": float(series.mean()),
        "median": float(series.median()),
        "min": float(series.min()),
        "max": float(series.max()),
    }


def write_csv(
    path: Union[str, Path],
    rows: Sequence[Mapping[str, Any]],
    columns: List[str],
    float_format: Optional[str] = FIELD_FORMAT,
) -> Path:
    """Write rows with a fixed column order through pandas."""
    path = Path(path)
    ensure_directory(path.parent)
    frame = pd.DataFrame(list(rows), columns=columns)
    frame.to_csv(path, index=False, float_format=float_format)
    return path


def read_csv(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path)
