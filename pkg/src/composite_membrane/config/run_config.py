"""
Declarative run configuration: flat ``key = value`` files with dotted sections.

Example::

    # disk, alpha = 10, half the area
    domain.shape = disk
    domain.radius = 1.0
    grid.nx = 128
    grid.ny = 128
    problem.alpha = 10
    problem.A_fraction = 0.5
    solver.init = annulus
"""

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from ..exceptions import ConfigError


def _parse_float(text: str) -> float:
    return float(text)


def _parse_int(text: str) -> int:
    return int(text)


def _parse_str(text: str) -> str:
    return text.strip().strip('"').strip("'")


def _parse_float_list(text: str) -> List[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


def _parse_int_list(text: str) -> List[int]:
    return [int(tok) for tok in text.replace(",", " ").split()]


def _parse_point(text: str) -> Tuple[float, float]:
    values = _parse_float_list(text)
    if len(values) != 2:
        raise ValueError("expected two coordinates")
    return values[0], values[1]


def _parse_point_list(text: str) -> List[Tuple[float, float]]:
    return [_parse_point(chunk) for chunk in text.split(";") if chunk.strip()]


def _parse_float_or_str(text: str) -> Union[float, str]:
    try:
        return float(text)
    except ValueError:
        return _parse_str(text)


@dataclass(frozen=True)
class _Key:
    parser: Callable[[str], Any]
    default: Any
    check: Callable[[Any], bool] = lambda value: True
    expect: str = ""


def _choice(*options: str) -> Callable[[Any], bool]:
    return lambda value: value in options


_SHAPES = ("disk", "rectangle", "ellipse", "stadium", "polygon")
_EXACT_KINDS = ("halfplane", "nonnegative", "blank")

SCHEMA: Dict[str, _Key] = {
    # domain
    "domain.shape": _Key(_parse_str, "disk", _choice(*_SHAPES), "one of " + "|".join(_SHAPES)),
    "domain.center": _Key(_parse_point, (0.0, 0.0)),
    "domain.radius": _Key(_parse_float, 1.0, lambda v: v > 0, "> 0"),
    "domain.semi_axes": _Key(_parse_float_list, [2.0, 1.0],
                             lambda v: len(v) == 2 and min(v) > 0, "two positive values"),
    "domain.bounds": _Key(_parse_float_list, [0.0, 1.0, 0.0, 1.0],
                          lambda v: len(v) == 4 and v[1] > v[0] and v[3] > v[2],
                          "xmin xmax ymin ymax with xmax > xmin, ymax > ymin"),
    "domain.half_length": _Key(_parse_float, 1.0, lambda v: v >= 0, ">= 0"),
    "domain.vertices": _Key(_parse_point_list, [], lambda v: len(v) >= 3 or len(v) == 0,
                            "at least three 'x y' pairs separated by ';'"),
    "domain.symmetry_axes": _Key(_parse_int, None, lambda v: v in (0, 1, 2), "0, 1 or 2"),
    # grid
    "grid.nx": _Key(_parse_int, 128, lambda v: v >= 3, ">= 3"),
    "grid.ny": _Key(_parse_int, 128, lambda v: v >= 3, ">= 3"),
    "grid.margin_cells": _Key(_parse_float, 2.0, lambda v: v >= 1, ">= 1"),
    "grid.bbox": _Key(_parse_float_list, None,
                      lambda v: len(v) == 4 and v[1] > v[0] and v[3] > v[2],
                      "xmin xmax ymin ymax"),
    # problem
    "problem.alpha": _Key(_parse_float, 10.0, lambda v: v >= 0, ">= 0"),
    "problem.A": _Key(_parse_float, None, lambda v: v >= 0, ">= 0"),
    "problem.A_fraction": _Key(_parse_float, None, lambda v: 0 < v < 1, "in (0, 1)"),
    "problem.A_list": _Key(_parse_float_list, None,
                           lambda v: len(v) >= 1 and all(b > a for a, b in zip(v, v[1:])),
                           "strictly increasing values"),
    # solver
    "solver.eigen_tol": _Key(_parse_float, None, lambda v: v > 0, "> 0"),
    "solver.tol": _Key(_parse_float, None, lambda v: v > 0, "> 0"),
    "solver.max_iter": _Key(_parse_int, None, lambda v: v >= 1, ">= 1"),
    "solver.init": _Key(_parse_str, "annulus", _choice("empty", "random", "annulus"),
                        "empty|random|annulus"),
    "solver.damping": _Key(_parse_float, None, lambda v: 0 <= v < 1, "in [0, 1)"),
    "solver.subsamples": _Key(_parse_int, None, lambda v: v >= 1, ">= 1"),
    "solver.warm_start": _Key(_parse_int, 1, _choice(0, 1), "0 or 1"),
    # run
    "run.seeds": _Key(_parse_int_list, [0], lambda v: len(v) >= 1, "at least one seed"),
    "run.threads": _Key(_parse_int, None, lambda v: v >= 1, ">= 1"),
    # free boundary
    "freeboundary.tau": _Key(_parse_float, None, lambda v: v > 0, "> 0"),
    "freeboundary.band_cells": _Key(_parse_int, None, lambda v: v >= 1, ">= 1"),
    # weiss
    "weiss.gamma": _Key(_parse_float, None, lambda v: 0 <= v < 1, "in [0, 1)"),
    "weiss.tol_W": _Key(_parse_float, None, lambda v: v > 0, "> 0"),
    "weiss.D": _Key(_parse_float_or_str, "calibrated",
                    lambda v: v == "calibrated" or (isinstance(v, float) and v >= 0),
                    "'calibrated' or a value >= 0"),
    "weiss.mode": _Key(_parse_str, "varying", _choice("varying", "frozen"), "varying|frozen"),
    "weiss.radii_cells": _Key(_parse_float_list, [4.0, 20.0, 9.0],
                              lambda v: len(v) == 3 and 0 < v[0] < v[1] and v[2] >= 2,
                              "min max count (in cells)"),
    "weiss.centers": _Key(_parse_int, 4, lambda v: v >= 1, ">= 1"),
    # blow-up
    "blowup.source": _Key(_parse_str, "pair",
                          _choice("pair", "halfplane", "nonnegative", "blank", "quartic"),
                          "pair|halfplane|nonnegative|blank|quartic"),
    "blowup.levels": _Key(_parse_int, 4, lambda v: v >= 2, ">= 2"),
    "blowup.r_max_cells": _Key(_parse_float, 64.0, lambda v: v >= 8, ">= 8"),
    # exact solutions
    "exact.kind": _Key(_parse_str, "halfplane", _choice(*_EXACT_KINDS), "|".join(_EXACT_KINDS)),
    "exact.f0": _Key(_parse_float, 1.0, lambda v: v > 0, "> 0"),
    "exact.g0": _Key(_parse_float, -20.0, lambda v: v < 0, "< 0"),
    "exact.a": _Key(_parse_float, 0.0),
    "exact.radii": _Key(_parse_float_list, [0.1, 0.2, 0.3, 0.4, 0.5],
                        lambda v: len(v) >= 2 and min(v) > 0, "at least two positive radii"),
    "exact.n": _Key(_parse_int, 512, lambda v: v >= 16, ">= 16"),
    # diagnostics
    "diagnostics.x0_list": _Key(_parse_point_list, [(0.0, 0.0), (5.0, -3.0), (-2.0, 7.0)],
                                lambda v: len(v) >= 1, "at least one 'x y' point"),
    "diagnostics.eps_list": _Key(_parse_float_list, None,
                                 lambda v: len(v) >= 1 and min(v) > 0, "positive values"),
    "diagnostics.slope_probe": _Key(_parse_float, 0.0, lambda v: v >= 0, ">= 0"),
    # output
    "output.dir": _Key(_parse_str, None),
}


@dataclass
class RunConfig:
    """Validated run configuration."""

    values: Dict[str, Any] = field(default_factory=dict)
    source: Optional[Path] = None

    @classmethod
    def from_text(cls, text: str, source: Optional[Path] = None) -> "RunConfig":
        """Parse and validate config text; unknown keys are rejected."""
        values: Dict[str, Any] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
            key, value = line.split("=", 1)
            key = key.strip()
            cls._set(values, key, value.strip())
        return cls(values=values, source=source)

    @classmethod
    def from_dict(cls, entries: Dict[str, Any]) -> "RunConfig":
        """Build a config from already-typed or textual entries."""
        values: Dict[str, Any] = {}
        for key, value in entries.items():
            if isinstance(value, str):
                cls._set(values, key, value)
            else:
                cls._check(key, value)
                values[key] = value
        return cls(values=values)

    @staticmethod
    def _set(values: Dict[str, Any], key: str, text: str) -> None:
        if key not in SCHEMA:
            raise ConfigError(key, "unknown key")
        try:
            value = SCHEMA[key].parser(text)
        except ValueError as e:
            raise ConfigError(key, f"cannot parse {text!r}: {e}") from e
        RunConfig._check(key, value)
        values[key] = value

    @staticmethod
    def _check(key: str, value: Any) -> None:
        if key not in SCHEMA:
            raise ConfigError(key, "unknown key")
        spec = SCHEMA[key]
        if not spec.check(value):
            raise ConfigError(key, f"value {value!r} out of range (expected {spec.expect})")

    def get(self, key: str, default: Any = None) -> Any:
        """Return the configured value, the given default, or the schema default."""
        if key not in SCHEMA:
            raise ConfigError(key, "unknown key")
        if key in self.values:
            return self.values[key]
        if default is not None:
            return default
        return SCHEMA[key].default

    def with_overrides(self, **entries: Any) -> "RunConfig":
        """Return a copy with dotted keys (given with '__' for '.') replaced."""
        values = dict(self.values)
        for name, value in entries.items():
            key = name.replace("__", ".")
            self._check(key, value)
            values[key] = value
        return RunConfig(values=values, source=self.source)

    def normalized(self) -> str:
        """Canonical ``key = value`` listing used for hashing and manifests."""
        return "\n".join(f"{key} = {self.values[key]!r}" for key in sorted(self.values))

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.normalized().encode("utf-8")).hexdigest()

    # --- builders -----------------------------------------------------

    def domain_spec(self):
        """Build the DomainSpec described by the ``domain.*`` keys."""
        from ..geometry import make_domain

        shape = self.get("domain.shape")
        params: Dict[str, Any] = {}
        if shape == "disk":
            params = {"center": self.get("domain.center"), "radius": self.get("domain.radius")}
        elif shape == "rectangle":
            params = {"bounds": tuple(self.get("domain.bounds"))}
        elif shape == "ellipse":
            params = {"center": self.get("domain.center"), "semi_axes": tuple(self.get("domain.semi_axes"))}
        elif shape == "stadium":
            params = {"center": self.get("domain.center"), "half_length": self.get("domain.half_length"),
                      "radius": self.get("domain.radius")}
        elif shape == "polygon":
            vertices = self.get("domain.vertices")
            if not vertices:
                raise ConfigError("domain.vertices", "required for polygon domains")
            params = {"vertices": tuple(vertices)}
        axes = self.values.get("domain.symmetry_axes")
        if axes is not None:
            params["symmetry_axes"] = axes
        try:
            return make_domain(shape, **params)
        except ValueError as e:
            raise ConfigError("domain.shape", str(e)) from e

    def grid(self, spec=None):
        """Build the Grid2D from ``grid.*`` keys; default bbox is the shape bbox plus a margin."""
        from ..geometry import build_grid

        nx, ny = self.get("grid.nx"), self.get("grid.ny")
        bbox = self.get("grid.bbox")
        if bbox is None:
            spec = spec or self.domain_spec()
            xmin, xmax, ymin, ymax = spec.bbox
            margin = self.get("grid.margin_cells")
            for key, n in (("grid.nx", nx), ("grid.ny", ny)):
                if n - 1 - 2 * margin <= 0:
                    raise ConfigError(key, f"{n} nodes leave no cells between two {margin:g}-cell margins")
            # m margin cells on each side of a shape spanning n - 1 - 2m cells
            px = margin * (xmax - xmin) / (nx - 1 - 2 * margin)
            py = margin * (ymax - ymin) / (ny - 1 - 2 * margin)
            bbox = [xmin - px, xmax + px, ymin - py, ymax + py]
        try:
            return build_grid(tuple(bbox), nx, ny)
        except ValueError as e:
            raise ConfigError("grid.nx", str(e)) from e

    def target_measure(self, omega_measure: float) -> float:
        """Resolve problem.A / problem.A_fraction against |Omega|."""
        if "problem.A" in self.values:
            return float(self.values["problem.A"])
        fraction = self.get("problem.A_fraction")
        if fraction is None:
            fraction = 0.5
        return fraction * omega_measure

    def measure_list(self, omega_measure: float) -> List[float]:
        values = self.get("problem.A_list")
        if values is None:
            raise ConfigError("problem.A_list", "required for sweeps")
        return [float(v) for v in values]


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Read and validate a run-config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError("--config", f"file not found: {path}")
    return RunConfig.from_text(path.read_text(encoding="utf-8"), source=path)
