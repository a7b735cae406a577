"""
Level-set extraction by marching squares and classification of free-boundary points.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import get_settings
from ..exceptions import ExtractionError, InvalidInputError
from ..geometry import ScalarField, gradient, gradient_norm, interpolate

logger = logging.getLogger(__name__)

EdgeKey = Tuple[str, int, int]

CSV_COLUMNS = ["poly_id", "x", "y", "grad_norm"]


@dataclass(frozen=True, eq=False)
class Polyline:
    points: np.ndarray
    closed: bool
    grad_norm: np.ndarray

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True, eq=False)
class Contour:
    """Polylines of ``{u = level}`` with ``|grad u|`` at every vertex."""

    level: float
    polylines: List[Polyline] = field(default_factory=list)

    @property
    def n_components(self) -> int:
        return len(self.polylines)

    @property
    def points(self) -> np.ndarray:
        if not self.polylines:
            return np.zeros((0, 2))
        return np.vstack([p.points for p in self.polylines])

    @property
    def grad_norm(self) -> np.ndarray:
        if not self.polylines:
            return np.zeros(0)
        return np.concatenate([p.grad_norm for p in self.polylines])

    @classmethod
    def from_points(
        cls, level: float, point_lists: Sequence[np.ndarray], field: ScalarField, closed: bool = False
    ) -> "Contour":
        """Contour through given vertices, with gradients sampled from ``field``."""
        grads = _GradientSampler(field)
        polylines = []
        for pts in point_lists:
            pts = np.asarray(pts, dtype=float)
            polylines.append(Polyline(pts, closed, grads(pts)))
        return cls(level, polylines)

    def to_rows(self) -> List[Dict[str, float]]:
        rows = []
        for poly_id, poly in enumerate(self.polylines):
            for (x, y), g in zip(poly.points, poly.grad_norm):
                rows.append({"poly_id": poly_id, "x": float(x), "y": float(y), "grad_norm": float(g)})
        return rows


class _GradientSampler:
    """Bilinear interpolation of the discrete gradient norm."""

    def __init__(self, field: ScalarField):
        self.gx, self.gy = gradient(field)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        if len(points) == 0:
            return np.zeros(0)
        px = interpolate(self.gx, points, order=1)
        py = interpolate(self.gy, points, order=1)
        return np.hypot(px, py)


def _cell_segments(case: int, center_above: bool) -> List[Tuple[int, int]]:
    """Edge pairs (0 bottom, 1 right, 2 top, 3 left) joined inside a cell."""
    bits = [(case >> k) & 1 for k in range(4)]
    crossed = [e for e, (a, b) in enumerate([(0, 1), (1, 2), (2, 3), (3, 0)]) if bits[a] != bits[b]]
    if len(crossed) == 2:
        return [(crossed[0], crossed[1])]
    # saddle cells, resolved by the cell-centre value
    if case == 5:
        return [(0, 1), (2, 3)] if center_above else [(3, 0), (1, 2)]
    return [(3, 0), (1, 2)] if center_above else [(0, 1), (2, 3)]


def extract_contour(field: ScalarField, c: float) -> Contour:
    """
    Marching-squares polylines of ``{field = c}`` over cells whose four nodes are inside.

    Crossings are placed by linear interpolation along cell edges.
    """
    inside = field.mask.inside
    values = field.values
    if not inside.any():
        raise InvalidInputError("field has no inside nodes")
    vmin = values[inside].min()
    vmax = values[inside].max()
    if not vmin < c < vmax:
        raise InvalidInputError(f"level {c!r} is not strictly between min {vmin!r} and max {vmax!r}")

    grid = field.grid
    valid = inside[:-1, :-1] & inside[:-1, 1:] & inside[1:, 1:] & inside[1:, :-1]
    above = values > c
    case = (
        above[:-1, :-1].astype(int)
        + 2 * above[:-1, 1:]
        + 4 * above[1:, 1:]
        + 8 * above[1:, :-1]
    )
    active = valid & (case != 0) & (case != 15)

    segments: List[Tuple[EdgeKey, EdgeKey]] = []
    for j, i in zip(*np.nonzero(active)):
        j, i = int(j), int(i)
        cs = int(case[j, i])
        center = 0.25 * (values[j, i] + values[j, i + 1] + values[j + 1, i + 1] + values[j + 1, i])
        keys = (("h", j, i), ("v", j, i + 1), ("h", j + 1, i), ("v", j, i))
        for a, b in _cell_segments(cs, center > c):
            segments.append((keys[a], keys[b]))
    if not segments:
        raise ExtractionError(f"empty contour at level {c!r}")

    def crossing(key: EdgeKey) -> Tuple[float, float]:
        kind, j, i = key
        va = values[j, i]
        if kind == "h":
            vb = values[j, i + 1]
            t = (c - va) / (vb - va)
            return grid.x[i] + t * grid.hx, grid.y[j]
        vb = values[j + 1, i]
        t = (c - va) / (vb - va)
        return grid.x[i], grid.y[j] + t * grid.hy

    adjacency: Dict[EdgeKey, List[int]] = defaultdict(list)
    for s, (a, b) in enumerate(segments):
        adjacency[a].append(s)
        adjacency[b].append(s)
    used = np.zeros(len(segments), dtype=bool)

    def walk(start: EdgeKey) -> List[EdgeKey]:
        chain = [start]
        current = start
        nxt = next((s for s in adjacency[current] if not used[s]), None)
        while nxt is not None:
            used[nxt] = True
            a, b = segments[nxt]
            current = b if a == current else a
            chain.append(current)
            nxt = next((s for s in adjacency[current] if not used[s]), None)
        return chain

    chains = []
    for key in sorted(k for k, segs in adjacency.items() if len(segs) == 1):
        if not all(used[s] for s in adjacency[key]):
            chains.append((walk(key), False))
    for s in range(len(segments)):
        if not used[s]:
            chain = walk(segments[s][0])
            closed = len(chain) > 2 and chain[-1] == chain[0]
            chains.append((chain[:-1] if closed else chain, closed))

    sampler = _GradientSampler(field)
    polylines = []
    for chain, closed in chains:
        pts = np.array([crossing(k) for k in chain], dtype=float)
        polylines.append(Polyline(pts, closed, sampler(pts)))
    logger.debug("contour at %.8g: %d polylines, %d vertices", c, len(polylines), sum(len(p) for p in polylines))
    return Contour(float(c), polylines)


def field_gradient_max(field: ScalarField) -> float:
    return float(gradient_norm(field).values[field.mask.inside].max())


def classify_points(
    contour: Contour, grad_max: float, tau: Optional[float] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Split contour vertices into ``(regular, singular)``.

    A vertex is singular iff its interpolated gradient norm is below ``tau * grad_max``.
    """
    tau = get_settings().tau if tau is None else tau
    if not tau > 0:
        raise InvalidInputError(f"tau must be > 0, got {tau}")
    points = contour.points
    singular = contour.grad_norm < tau * grad_max
    return points[~singular], points[singular]
