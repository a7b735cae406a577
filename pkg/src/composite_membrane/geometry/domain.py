"""
Domain shapes and their rasterization onto node grids.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import get_settings
from ..exceptions import InvalidInputError
from .grid import BBox, Grid2D

logger = logging.getLogger(__name__)

MIN_EDGE_FRACTION = 1e-3
_BISECTION_STEPS = 50

# neighbour order used by DomainMask.edge_fraction: west, east, south, north
NEIGHBOURS: Tuple[Tuple[int, int], ...] = ((0, -1), (0, 1), (-1, 0), (1, 0))


@dataclass(frozen=True)
class BoundarySamples:
    """Quadrature nodes on the boundary: points, outward unit normals, arc weights."""

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    corners: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))

    @property
    def length(self) -> float:
        return float(self.weights.sum())


def _arc_samples(center, radius, start, stop, spacing) -> BoundarySamples:
    n = max(8, int(math.ceil(abs(stop - start) * radius / spacing)))
    t = start + (np.arange(n) + 0.5) * (stop - start) / n
    normals = np.column_stack([np.cos(t), np.sin(t)])
    points = np.asarray(center, dtype=float) + radius * normals
    weights = np.full(n, abs(stop - start) * radius / n)
    return BoundarySamples(points, normals, weights)


def _segment_samples(a, b, normal, spacing) -> BoundarySamples:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    length = float(np.hypot(*(b - a)))
    n = max(2, int(math.ceil(length / spacing)))
    t = (np.arange(n) + 0.5) / n
    points = a + t[:, None] * (b - a)
    normals = np.tile(np.asarray(normal, dtype=float), (n, 1))
    return BoundarySamples(points, normals, np.full(n, length / n))


def _concat(parts: Sequence[BoundarySamples], corners=None) -> BoundarySamples:
    return BoundarySamples(
        np.vstack([p.points for p in parts]),
        np.vstack([p.normals for p in parts]),
        np.concatenate([p.weights for p in parts]),
        np.zeros((0, 2)) if corners is None else np.asarray(corners, dtype=float),
    )


class DomainSpec(ABC):
    """A bounded open set in the plane with declared symmetry axes."""

    shape: str = ""
    symmetry_axes: int = 0

    @abstractmethod
    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Strict membership test, vectorized over coordinate arrays."""

    @property
    @abstractmethod
    def bbox(self) -> BBox:
        ...

    @property
    @abstractmethod
    def area(self) -> float:
        ...

    @property
    @abstractmethod
    def center(self) -> Tuple[float, float]:
        ...

    @abstractmethod
    def boundary_samples(self, spacing: float) -> BoundarySamples:
        """Midpoint-rule samples of the boundary with roughly ``spacing`` arc length each."""

    def available_axes(self) -> int:
        return 2

    def _check_axes(self) -> None:
        if self.symmetry_axes not in (0, 1, 2):
            raise InvalidInputError(f"{self.shape}: symmetry_axes must be 0, 1 or 2")
        if self.symmetry_axes > self.available_axes():
            raise InvalidInputError(
                f"{self.shape}: declares {self.symmetry_axes} symmetry axes "
                f"but only {self.available_axes()} are actual symmetries"
            )

    def to_dict(self) -> dict:
        return {"shape": self.shape, "symmetry_axes": self.symmetry_axes}


@dataclass(frozen=True)
class Disk(DomainSpec):
    center_point: Tuple[float, float] = (0.0, 0.0)
    radius: float = 1.0
    symmetry_axes: int = 2
    shape = "disk"

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidInputError(f"disk radius must be > 0, got {self.radius}")
        self._check_axes()

    def contains(self, x, y):
        cx, cy = self.center_point
        return (x - cx) ** 2 + (y - cy) ** 2 < self.radius ** 2

    @property
    def bbox(self):
        cx, cy = self.center_point
        r = self.radius
        return (cx - r, cx + r, cy - r, cy + r)

    @property
    def area(self):
        return math.pi * self.radius ** 2

    @property
    def center(self):
        return self.center_point

    def boundary_samples(self, spacing):
        return _arc_samples(self.center_point, self.radius, 0.0, 2 * math.pi, spacing)

    def to_dict(self):
        return {**super().to_dict(), "center": list(self.center_point), "radius": self.radius}


@dataclass(frozen=True)
class Rectangle(DomainSpec):
    bounds: Tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0)
    symmetry_axes: int = 2
    shape = "rectangle"

    def __post_init__(self):
        xmin, xmax, ymin, ymax = self.bounds
        if not (xmax > xmin and ymax > ymin):
            raise InvalidInputError(f"rectangle bounds are degenerate: {self.bounds!r}")
        self._check_axes()

    def contains(self, x, y):
        xmin, xmax, ymin, ymax = self.bounds
        return (x > xmin) & (x < xmax) & (y > ymin) & (y < ymax)

    @property
    def bbox(self):
        return tuple(float(b) for b in self.bounds)

    @property
    def area(self):
        xmin, xmax, ymin, ymax = self.bounds
        return (xmax - xmin) * (ymax - ymin)

    @property
    def center(self):
        xmin, xmax, ymin, ymax = self.bounds
        return (0.5 * (xmin + xmax), 0.5 * (ymin + ymax))

    def boundary_samples(self, spacing):
        xmin, xmax, ymin, ymax = self.bounds
        corners = [(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)]
        parts = [
            _segment_samples(corners[0], corners[1], (0.0, -1.0), spacing),
            _segment_samples(corners[1], corners[2], (1.0, 0.0), spacing),
            _segment_samples(corners[2], corners[3], (0.0, 1.0), spacing),
            _segment_samples(corners[3], corners[0], (-1.0, 0.0), spacing),
        ]
        return _concat(parts, corners)

    def to_dict(self):
        return {**super().to_dict(), "bounds": list(self.bounds)}


@dataclass(frozen=True)
class Ellipse(DomainSpec):
    center_point: Tuple[float, float] = (0.0, 0.0)
    semi_axes: Tuple[float, float] = (2.0, 1.0)
    symmetry_axes: int = 2
    shape = "ellipse"

    def __post_init__(self):
        if len(self.semi_axes) != 2 or min(self.semi_axes) <= 0:
            raise InvalidInputError(f"ellipse semi-axes must be two positive values, got {self.semi_axes!r}")
        self._check_axes()

    def contains(self, x, y):
        cx, cy = self.center_point
        a, b = self.semi_axes
        return ((x - cx) / a) ** 2 + ((y - cy) / b) ** 2 < 1.0

    @property
    def bbox(self):
        cx, cy = self.center_point
        a, b = self.semi_axes
        return (cx - a, cx + a, cy - b, cy + b)

    @property
    def area(self):
        return math.pi * self.semi_axes[0] * self.semi_axes[1]

    @property
    def center(self):
        return self.center_point

    def boundary_samples(self, spacing):
        a, b = self.semi_axes
        perimeter = math.pi * (3 * (a + b) - math.sqrt((3 * a + b) * (a + 3 * b)))
        n = max(16, int(math.ceil(perimeter / spacing)))
        t = (np.arange(n) + 0.5) * 2 * math.pi / n
        points = np.column_stack([a * np.cos(t), b * np.sin(t)]) + np.asarray(self.center_point)
        normal = np.column_stack([b * np.cos(t), a * np.sin(t)])
        speed = np.hypot(normal[:, 0], normal[:, 1])
        return BoundarySamples(points, normal / speed[:, None], speed * 2 * math.pi / n)

    def to_dict(self):
        return {**super().to_dict(), "center": list(self.center_point), "semi_axes": list(self.semi_axes)}


@dataclass(frozen=True)
class Stadium(DomainSpec):
    """Rectangle of half-length ``half_length`` capped by two half-disks of radius ``radius``."""

    center_point: Tuple[float, float] = (0.0, 0.0)
    half_length: float = 1.0
    radius: float = 1.0
    symmetry_axes: int = 2
    shape = "stadium"

    def __post_init__(self):
        if not self.radius > 0 or self.half_length < 0:
            raise InvalidInputError("stadium needs radius > 0 and half_length >= 0")
        self._check_axes()

    def contains(self, x, y):
        cx, cy = self.center_point
        dx = np.maximum(np.abs(x - cx) - self.half_length, 0.0)
        return dx ** 2 + (y - cy) ** 2 < self.radius ** 2

    @property
    def bbox(self):
        cx, cy = self.center_point
        L, R = self.half_length, self.radius
        return (cx - L - R, cx + L + R, cy - R, cy + R)

    @property
    def area(self):
        return 4 * self.half_length * self.radius + math.pi * self.radius ** 2

    @property
    def center(self):
        return self.center_point

    def boundary_samples(self, spacing):
        cx, cy = self.center_point
        L, R = self.half_length, self.radius
        parts = [
            _arc_samples((cx + L, cy), R, -math.pi / 2, math.pi / 2, spacing),
            _arc_samples((cx - L, cy), R, math.pi / 2, 3 * math.pi / 2, spacing),
        ]
        if L > 0:
            parts.append(_segment_samples((cx - L, cy - R), (cx + L, cy - R), (0.0, -1.0), spacing))
            parts.append(_segment_samples((cx + L, cy + R), (cx - L, cy + R), (0.0, 1.0), spacing))
        return _concat(parts)

    def to_dict(self):
        return {**super().to_dict(), "center": list(self.center_point),
                "half_length": self.half_length, "radius": self.radius}


@dataclass(frozen=True)
class Polygon(DomainSpec):
    """Simple polygon; vertices in either orientation."""

    vertices: Tuple[Tuple[float, float], ...] = ()
    symmetry_axes: int = 0
    shape = "polygon"

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise InvalidInputError("polygon needs at least three vertices")
        if abs(self._signed_area()) <= 0:
            raise InvalidInputError("polygon has zero area")
        self._check_axes()

    @property
    def _xy(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    def _signed_area(self) -> float:
        v = self._xy
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def contains(self, x, y):
        v = self._xy
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inside = np.zeros(np.broadcast(x, y).shape, dtype=bool)
        n = len(v)
        with np.errstate(divide="ignore", invalid="ignore"):
            for k in range(n):
                xi, yi = v[k]
                xj, yj = v[k - 1]
                crosses = (yi > y) != (yj > y)
                x_cross = (xj - xi) * (y - yi) / (yj - yi) + xi
                inside ^= crosses & (x < x_cross)
        return inside

    @property
    def bbox(self):
        v = self._xy
        return (float(v[:, 0].min()), float(v[:, 0].max()), float(v[:, 1].min()), float(v[:, 1].max()))

    @property
    def area(self):
        return abs(self._signed_area())

    @property
    def center(self):
        v = self._xy
        x, y = v[:, 0], v[:, 1]
        cross = x * np.roll(y, -1) - np.roll(x, -1) * y
        a = self._signed_area()
        return (float(np.sum((x + np.roll(x, -1)) * cross) / (6 * a)),
                float(np.sum((y + np.roll(y, -1)) * cross) / (6 * a)))

    def available_axes(self) -> int:
        v = self._xy
        cx, cy = self.center
        scale = max(np.ptp(v[:, 0]), np.ptp(v[:, 1]))

        def matches(reflected):
            d = np.abs(reflected[:, None, :] - v[None, :, :]).max(axis=2)
            return bool(np.all(d.min(axis=1) < 1e-9 * scale))

        vertical = matches(np.column_stack([2 * cx - v[:, 0], v[:, 1]]))
        horizontal = matches(np.column_stack([v[:, 0], 2 * cy - v[:, 1]]))
        return int(vertical) + int(horizontal)

    def boundary_samples(self, spacing):
        v = self._xy
        orientation = 1.0 if self._signed_area() > 0 else -1.0
        parts = []
        for k in range(len(v)):
            a, b = v[k], v[(k + 1) % len(v)]
            d = b - a
            normal = orientation * np.array([d[1], -d[0]]) / np.hypot(*d)
            parts.append(_segment_samples(a, b, normal, spacing))
        return _concat(parts, v)

    def to_dict(self):
        return {**super().to_dict(), "vertices": [list(p) for p in self.vertices]}


_SHAPES = {"disk": Disk, "rectangle": Rectangle, "ellipse": Ellipse, "stadium": Stadium, "polygon": Polygon}


def make_domain(shape: str, **params) -> DomainSpec:
    """Build a DomainSpec from a shape tag and its parameters."""
    if shape not in _SHAPES:
        raise InvalidInputError(f"unknown shape {shape!r}; expected one of {sorted(_SHAPES)}")
    if "center" in params:
        params["center_point"] = tuple(params.pop("center"))
    return _SHAPES[shape](**params)


@dataclass(frozen=True, eq=False)
class DomainMask:
    """
    Node-wise description of a region on a grid.

    ``inside`` marks the unknown nodes (strictly inside the region and off the
    grid edge); ``weights`` holds each node's dual-cell area clipped to the
    region. For the domain itself ``edge_fraction[d, j, i]`` is the fraction of
    the grid edge towards neighbour ``d`` (see ``NEIGHBOURS``) lying inside.
    """

    grid: Grid2D
    inside: np.ndarray
    weights: np.ndarray
    edge_fraction: Optional[np.ndarray] = None

    @property
    def measure(self) -> float:
        return float(self.weights.sum())

    @property
    def n_inside(self) -> int:
        return int(self.inside.sum())

    @property
    def support(self) -> np.ndarray:
        return self.weights > 0

    @classmethod
    def full(cls, grid: Grid2D) -> "DomainMask":
        """Every node is inside; weights are the dual cells clipped to the grid bbox."""
        wx = np.full(grid.nx, grid.hx)
        wx[[0, -1]] *= 0.5
        wy = np.full(grid.ny, grid.hy)
        wy[[0, -1]] *= 0.5
        return cls(grid, np.ones(grid.shape, dtype=bool), np.outer(wy, wx))

    @classmethod
    def empty_like(cls, mask: "DomainMask") -> "DomainMask":
        return cls(mask.grid, np.zeros(mask.grid.shape, dtype=bool), np.zeros(mask.grid.shape))

    def fraction_of(self, omega: "DomainMask") -> np.ndarray:
        """Node-wise share of ``omega``'s cell weight covered by this region."""
        frac = np.zeros(self.grid.shape)
        np.divide(self.weights, omega.weights, out=frac, where=omega.weights > 0)
        return np.clip(frac, 0.0, 1.0)

    def same_as(self, other: "DomainMask") -> bool:
        return (
            self.grid == other.grid
            and np.array_equal(self.inside, other.inside)
            and np.allclose(self.weights, other.weights, rtol=0, atol=1e-12 * self.grid.cell_area)
        )

    def symmetric_difference(self, other: "DomainMask") -> float:
        return float(np.abs(self.weights - other.weights).sum())

    def radial_symmetry_defect(
        self, center: Tuple[float, float], omega: "DomainMask", bin_width: Optional[float] = None
    ) -> float:
        """
        Area mismatch of this region against its own angular average, relative to its measure.

        Nodes are binned by distance to ``center`` (bin width ``h/4`` by default).
        """
        if self.measure <= 0:
            return 0.0
        bin_width = bin_width or 0.25 * min(self.grid.hx, self.grid.hy)
        X, Y = self.grid.coords
        support = omega.weights > 0
        rho = np.hypot(X - center[0], Y - center[1])[support]
        bins = np.floor(rho / bin_width).astype(int)
        d_w = self.weights[support]
        o_w = omega.weights[support]
        d_sum = np.bincount(bins, weights=d_w)
        o_sum = np.bincount(bins, weights=o_w)
        mean_frac = np.divide(d_sum, o_sum, out=np.zeros_like(d_sum), where=o_sum > 0)
        mismatch = np.abs(d_w - mean_frac[bins] * o_w).sum()
        return float(mismatch / self.measure)


def _subsample_offsets(h: float, n: int) -> np.ndarray:
    return ((np.arange(n) + 0.5) / n - 0.5) * h


def _edge_fractions(spec: DomainSpec, grid: Grid2D, inside: np.ndarray) -> np.ndarray:
    X, Y = grid.coords
    fractions = np.ones((4,) + grid.shape)
    for d, (dj, di) in enumerate(NEIGHBOURS):
        neighbour_inside = np.roll(inside, shift=(-dj, -di), axis=(0, 1))
        jj, ii = np.nonzero(inside & ~neighbour_inside)
        if jj.size == 0:
            continue
        px, py = X[jj, ii], Y[jj, ii]
        qx, qy = X[jj + dj, ii + di], Y[jj + dj, ii + di]
        lo = np.zeros(jj.size)
        hi = np.ones(jj.size)
        for _ in range(_BISECTION_STEPS):
            mid = 0.5 * (lo + hi)
            hit = spec.contains(px + mid * (qx - px), py + mid * (qy - py))
            lo = np.where(hit, mid, lo)
            hi = np.where(hit, hi, mid)
        fractions[d, jj, ii] = 0.5 * (lo + hi)
    return fractions


def rasterize_domain(spec: DomainSpec, grid: Grid2D, subsamples: Optional[int] = None) -> DomainMask:
    """
    Rasterize ``spec`` onto ``grid``.

    Cell weights come from ``subsamples x subsamples`` point counts per dual
    cell; the shape must lie inside the grid bbox.
    """
    subsamples = subsamples or get_settings().subsamples
    xmin, xmax, ymin, ymax = grid.bbox
    sxmin, sxmax, symin, symax = spec.bbox
    slack = 1e-12 * max(xmax - xmin, ymax - ymin)
    if sxmin < xmin - slack or sxmax > xmax + slack or symin < ymin - slack or symax > ymax + slack:
        raise InvalidInputError(f"{spec.shape} with bbox {spec.bbox} exceeds grid bbox {grid.bbox}")

    X, Y = grid.coords
    inside = np.asarray(spec.contains(X, Y), dtype=bool)
    inside[[0, -1], :] = False
    inside[:, [0, -1]] = False

    # nodes on the boundary up to rounding are Dirichlet nodes, not unknowns
    fractions = _edge_fractions(spec, grid, inside)
    demoted = 0
    while True:
        on_boundary = inside & (fractions.min(axis=0) < MIN_EDGE_FRACTION)
        if not on_boundary.any():
            break
        demoted += int(on_boundary.sum())
        inside &= ~on_boundary
        fractions = _edge_fractions(spec, grid, inside)
    if demoted:
        logger.debug("%d node(s) within %.0e h of the boundary treated as Dirichlet nodes", demoted, MIN_EDGE_FRACTION)
    if not inside.any():
        raise InvalidInputError(f"{spec.shape} has no interior nodes on a {grid.nx}x{grid.ny} grid")

    ox = _subsample_offsets(grid.hx, subsamples)
    oy = _subsample_offsets(grid.hy, subsamples)
    weights = np.zeros(grid.shape)
    for dy in oy:
        for dx in ox:
            weights += spec.contains(X + dx, Y + dy)
    weights *= grid.cell_area / subsamples ** 2

    mask = DomainMask(grid, inside, weights, fractions)
    logger.debug(
        "Rasterized %s on %dx%d grid: %d unknowns, measure %.6g (exact %.6g)",
        spec.shape, grid.nx, grid.ny, mask.n_inside, mask.measure, spec.area,
    )
    return mask
