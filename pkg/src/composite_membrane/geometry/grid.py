"""
Uniform node grids on a rectangle.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Tuple

import numpy as np

from ..exceptions import InvalidInputError

BBox = Tuple[float, float, float, float]


@dataclass(frozen=True)
class Grid2D:
    """
    Node grid with ``nx`` columns and ``ny`` rows over ``bbox``.

    Node arrays have shape ``(ny, nx)`` and are indexed ``[j, i]`` with
    ``x = xmin + i*hx`` and ``y = ymin + j*hy``.
    """

    bbox: BBox
    nx: int
    ny: int

    @property
    def hx(self) -> float:
        return (self.bbox[1] - self.bbox[0]) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.bbox[3] - self.bbox[2]) / (self.ny - 1)

    @property
    def h(self) -> float:
        """Largest spacing."""
        return max(self.hx, self.hy)

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.ny, self.nx)

    @cached_property
    def x(self) -> np.ndarray:
        return np.linspace(self.bbox[0], self.bbox[1], self.nx)

    @cached_property
    def y(self) -> np.ndarray:
        return np.linspace(self.bbox[2], self.bbox[3], self.ny)

    @cached_property
    def coords(self) -> Tuple[np.ndarray, np.ndarray]:
        """Node coordinate arrays ``(X, Y)``, each of shape ``(ny, nx)``."""
        return tuple(np.meshgrid(self.x, self.y, indexing="xy"))

    def to_index(self, points: np.ndarray) -> np.ndarray:
        """Fractional ``(j, i)`` index coordinates of ``(m, 2)`` points, shape ``(2, m)``."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        jj = (points[:, 1] - self.bbox[2]) / self.hy
        ii = (points[:, 0] - self.bbox[0]) / self.hx
        return np.vstack([jj, ii])

    def scaled(self, factor: float) -> "Grid2D":
        """Same node counts over the bbox scaled about the origin."""
        xmin, xmax, ymin, ymax = self.bbox
        return Grid2D((xmin * factor, xmax * factor, ymin * factor, ymax * factor), self.nx, self.ny)

    def to_dict(self) -> dict:
        return {"bbox": list(self.bbox), "nx": self.nx, "ny": self.ny, "hx": self.hx, "hy": self.hy}


def build_grid(bbox: BBox, nx: int, ny: int) -> Grid2D:
    """Validate and build a :class:`Grid2D`."""
    if int(nx) != nx or int(ny) != ny or nx < 3 or ny < 3:
        raise InvalidInputError(f"grid needs nx, ny >= 3 (got nx={nx}, ny={ny})")
    if len(bbox) != 4:
        raise InvalidInputError(f"bbox must be (xmin, xmax, ymin, ymax), got {bbox!r}")
    xmin, xmax, ymin, ymax = (float(b) for b in bbox)
    if not np.all(np.isfinite([xmin, xmax, ymin, ymax])) or xmax <= xmin or ymax <= ymin:
        raise InvalidInputError(f"degenerate bbox {bbox!r}")
    return Grid2D((xmin, xmax, ymin, ymax), int(nx), int(ny))
