"""Scenario description: monitored area, terrain, areas, fixed poles and parameters.

The scenario file is a line-oriented keyword format::

    # comment
    ma <x_max> <y_max> <cell_size>
    pole_height <L>
    param <name> <value>
    elevation
    <row 0: ncols reals>          # row r covers y in [r*cell, (r+1)*cell)
    ...
    pole_cost                     # optional per-cell relay cost raster
    <rows as for elevation>
    obstacle <x0> <y0> <x1> <y1> <height>
    forbid_place <x0> <y0> <x1> <y1>
    forbid_link <x0> <y0> <x1> <y1> <z0> <z1>
    sensor <x> <y>
    gateway <x> <y>
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Optional

import numpy as np

DEFAULT_RHO_SET = (1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4)

_TOL = 1e-9


class ScenarioError(ValueError):
    """Raised for malformed scenario text."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Params:
    fault_tolerance: int = 1
    max_hops: int = 5
    max_antennas_gateway: int = 4
    max_antennas_sensor: int = 4
    max_antennas_relay: int = 4
    max_links_per_pole: int = 4
    antenna_cost: float = 1.0
    link_penalty: float = 0.0
    pole_cost_base: float = 10.0
    rho: float = 1.0
    orientations: int = 4
    beam_halfwidth: float = 45.0
    radio_range: float = 1000.0


_INT_PARAMS = {f.name for f in fields(Params) if f.type in ("int", int)}


@dataclass(frozen=True)
class AreaBox:
    x0: float
    y0: float
    x1: float
    y1: float
    z0: Optional[float] = None
    z1: Optional[float] = None

    def contains_xy(self, x: float, y: float) -> bool:
        # boundary-inclusive
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1


@dataclass(frozen=True)
class Obstacle:
    """Solid box standing on the terrain; ``height`` is metres above local ground."""

    x0: float
    y0: float
    x1: float
    y1: float
    height: float

    def contains_xy(self, x: float, y: float) -> bool:
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1


@dataclass(frozen=True)
class FixedPole:
    x: float
    y: float
    kind: str  # "sensor" | "gateway"


@dataclass(frozen=True, eq=False)
class Scenario:
    x_max: float
    y_max: float
    cell_size: float
    elevation: np.ndarray
    sensors: tuple[FixedPole, ...]
    gateways: tuple[FixedPole, ...]
    obstacles: tuple[Obstacle, ...] = ()
    forbidden_placement: tuple[AreaBox, ...] = ()
    forbidden_link: tuple[AreaBox, ...] = ()
    pole_height: float = 6.0
    params: Params = field(default_factory=Params)
    cost_raster: Optional[np.ndarray] = None

    @property
    def grid_shape(self) -> tuple[int, int]:
        """(rows, cols) the elevation grid must have."""
        return (
            math.ceil(self.y_max / self.cell_size - _TOL),
            math.ceil(self.x_max / self.cell_size - _TOL),
        )

    def with_params(self, **changes) -> "Scenario":
        return replace(self, params=replace(self.params, **changes))

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                if a is None or b is None or not np.array_equal(a, b):
                    return False
            elif a != b:
                return False
        return True

    __hash__ = None


def _fmt(x) -> str:
    """Shortest text that round-trips the number."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _floats(tokens, lineno, count=None):
    if count is not None and len(tokens) != count:
        raise ScenarioError(f"expected {count} numbers, got {len(tokens)}", lineno)
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise ScenarioError(f"not a number: {exc}", lineno) from None


def _read_grid(lines, start, nrows, ncols, what):
    """Read ``nrows`` data rows after ``start``; returns (array, next index)."""
    rows = []
    idx = start
    while len(rows) < nrows:
        if idx >= len(lines):
            raise ScenarioError(
                f"{what} grid has {len(rows)} rows, expected {nrows}", idx
            )
        lineno, toks = lines[idx]
        if toks[0] in _KEYWORDS:
            raise ScenarioError(
                f"{what} grid has {len(rows)} rows, expected {nrows}", lineno
            )
        vals = _floats(toks, lineno)
        if len(vals) != ncols:
            raise ScenarioError(
                f"{what} row has {len(vals)} values, expected {ncols}", lineno
            )
        rows.append(vals)
        idx += 1
    if idx < len(lines) and lines[idx][1][0] not in _KEYWORDS:
        raise ScenarioError(f"{what} grid has more than {nrows} rows", lines[idx][0])
    return np.array(rows, dtype=float).reshape(nrows, ncols), idx


_KEYWORDS = {
    "ma",
    "pole_height",
    "param",
    "elevation",
    "pole_cost",
    "obstacle",
    "forbid_place",
    "forbid_link",
    "sensor",
    "gateway",
}


def parse_scenario(text: str) -> Scenario:
    """Parse scenario-file text into a :class:`Scenario`.

    Raises ScenarioError (with ``.line`` set) on syntax errors, unknown keys,
    grid dimension mismatches and sensors/gateways outside the area.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body.split()))

    extent = None
    ma_line = None
    pole_height = None
    params: dict = {}
    elevation = None
    cost_raster = None
    obstacles, fplace, flink, sensors, gateways = [], [], [], [], []

    idx = 0
    while idx < len(lines):
        lineno, toks = lines[idx]
        key, args = toks[0], toks[1:]
        idx += 1
        if key == "ma":
            if extent is not None:
                raise ScenarioError("duplicate 'ma'", lineno)
            extent = _floats(args, lineno, 3)
            ma_line = lineno
            if min(extent) <= 0:
                raise ScenarioError("ma extent and cell size must be positive", lineno)
        elif key == "pole_height":
            (pole_height,) = _floats(args, lineno, 1)
        elif key == "param":
            if len(args) != 2:
                raise ScenarioError("param needs a name and a value", lineno)
            name, value = args
            if name not in Params.__dataclass_fields__:
                raise ScenarioError(f"unknown param {name!r}", lineno)
            try:
                params[name] = int(value) if name in _INT_PARAMS else float(value)
            except ValueError:
                raise ScenarioError(f"bad value for {name}: {value!r}", lineno) from None
        elif key in ("elevation", "pole_cost"):
            if extent is None:
                raise ScenarioError(f"'{key}' before 'ma'", lineno)
            if args:
                raise ScenarioError(f"'{key}' takes no arguments", lineno)
            nrows = math.ceil(extent[1] / extent[2] - _TOL)
            ncols = math.ceil(extent[0] / extent[2] - _TOL)
            grid, idx = _read_grid(lines, idx, nrows, ncols, key)
            if key == "elevation":
                elevation = grid
            else:
                cost_raster = grid
        elif key == "obstacle":
            obstacles.append(Obstacle(*_floats(args, lineno, 5)))
        elif key == "forbid_place":
            fplace.append(AreaBox(*_floats(args, lineno, 4)))
        elif key == "forbid_link":
            flink.append(AreaBox(*_floats(args, lineno, 6)))
        elif key in ("sensor", "gateway"):
            x, y = _floats(args, lineno, 2)
            if extent is not None and not (0 <= x <= extent[0] and 0 <= y <= extent[1]):
                raise ScenarioError(f"{key} at ({x}, {y}) lies outside the area", lineno)
            (sensors if key == "sensor" else gateways).append(FixedPole(x, y, key))
        else:
            raise ScenarioError(f"unknown keyword {key!r}", lineno)

    if extent is None:
        raise ScenarioError("missing 'ma' line")
    if elevation is None:
        raise ScenarioError("missing 'elevation' section", ma_line)
    for p in sensors + gateways:
        if not (0 <= p.x <= extent[0] and 0 <= p.y <= extent[1]):
            raise ScenarioError(f"{p.kind} at ({p.x}, {p.y}) lies outside the area")

    kwargs = {}
    if pole_height is not None:
        kwargs["pole_height"] = pole_height
    return Scenario(
        x_max=extent[0],
        y_max=extent[1],
        cell_size=extent[2],
        elevation=elevation,
        sensors=tuple(sensors),
        gateways=tuple(gateways),
        obstacles=tuple(obstacles),
        forbidden_placement=tuple(fplace),
        forbidden_link=tuple(flink),
        params=Params(**params),
        cost_raster=cost_raster,
        **kwargs,
    )


def serialize_scenario(s: Scenario) -> str:
    """Canonical text form; ``parse_scenario(serialize_scenario(s)) == s``."""
    out = [f"ma {_fmt(s.x_max)} {_fmt(s.y_max)} {_fmt(s.cell_size)}"]
    out.append(f"pole_height {_fmt(s.pole_height)}")
    for f in fields(Params):
        out.append(f"param {f.name} {_fmt(getattr(s.params, f.name))}")
    out.append("elevation")
    out.extend(" ".join(_fmt(v) for v in row) for row in np.asarray(s.elevation))
    if s.cost_raster is not None:
        out.append("pole_cost")
        out.extend(" ".join(_fmt(v) for v in row) for row in np.asarray(s.cost_raster))
    for o in s.obstacles:
        out.append("obstacle " + " ".join(_fmt(v) for v in (o.x0, o.y0, o.x1, o.y1, o.height)))
    for b in s.forbidden_placement:
        out.append("forbid_place " + " ".join(_fmt(v) for v in (b.x0, b.y0, b.x1, b.y1)))
    for b in s.forbidden_link:
        out.append(
            "forbid_link " + " ".join(_fmt(v) for v in (b.x0, b.y0, b.x1, b.y1, b.z0, b.z1))
        )
    for p in s.sensors:
        out.append(f"sensor {_fmt(p.x)} {_fmt(p.y)}")
    for p in s.gateways:
        out.append(f"gateway {_fmt(p.x)} {_fmt(p.y)}")
    return "\n".join(out) + "\n"


def validate_scenario(s: Scenario, rho_set=DEFAULT_RHO_SET) -> list[str]:
    """Return a list of human-readable invariant violations (empty if valid)."""
    problems = []
    p = s.params
    rows, cols = s.grid_shape
    if np.shape(s.elevation) != (rows, cols):
        problems.append(
            f"elevation: shape {np.shape(s.elevation)} != ceil(y_max/cell) x ceil(x_max/cell) = {(rows, cols)}"
        )
    if s.cost_raster is not None and np.shape(s.cost_raster) != (rows, cols):
        problems.append(f"cost_raster: shape {np.shape(s.cost_raster)} != {(rows, cols)}")
    if s.pole_height <= 0:
        problems.append("pole_height: must be positive")

    for k, box in enumerate(s.forbidden_placement):
        if not (box.x0 < box.x1 and box.y0 < box.y1):
            problems.append(f"forbidden_placement[{k}]: requires x0<x1 and y0<y1")
    for k, box in enumerate(s.forbidden_link):
        if not (box.x0 < box.x1 and box.y0 < box.y1):
            problems.append(f"forbidden_link[{k}]: requires x0<x1 and y0<y1")
        if box.z0 is not None and box.z1 is not None and not box.z0 < box.z1:
            problems.append(f"forbidden_link[{k}]: requires z0<z1")
    for k, o in enumerate(s.obstacles):
        if not (o.x0 < o.x1 and o.y0 < o.y1):
            problems.append(f"obstacles[{k}]: requires x0<x1 and y0<y1")
        if o.height <= 0:
            problems.append(f"obstacles[{k}]: height must be positive")

    seen = {}
    for group, name in ((s.sensors, "sensors"), (s.gateways, "gateways")):
        for k, pole in enumerate(group):
            label = f"{name}[{k}] at ({_fmt(pole.x)}, {_fmt(pole.y)})"
            if not (0 <= pole.x <= s.x_max and 0 <= pole.y <= s.y_max):
                problems.append(f"{label}: lies outside the monitored area")
            for b in s.forbidden_placement:
                if b.contains_xy(pole.x, pole.y):
                    problems.append(f"{label}: lies inside a forbidden placement area")
                    break
            if (pole.x, pole.y) in seen:
                problems.append(f"{label}: same position as {seen[(pole.x, pole.y)]}")
            else:
                seen[(pole.x, pole.y)] = label
    if not s.sensors:
        problems.append("sensors: at least one sensor required")
    if not s.gateways:
        problems.append("gateways: at least one gateway required")

    if p.fault_tolerance < 0:
        problems.append("params.fault_tolerance: must be >= 0")
    if p.fault_tolerance + 1 > p.max_antennas_sensor:
        problems.append(
            f"params.fault_tolerance: F+1 = {p.fault_tolerance + 1} exceeds "
            f"max_antennas_sensor = {p.max_antennas_sensor}"
        )
    for name in (
        "max_hops",
        "max_antennas_gateway",
        "max_antennas_sensor",
        "max_antennas_relay",
        "max_links_per_pole",
        "orientations",
    ):
        if getattr(p, name) < 1:
            problems.append(f"params.{name}: must be >= 1")
    for name in ("antenna_cost", "link_penalty", "pole_cost_base"):
        if getattr(p, name) < 0:
            problems.append(f"params.{name}: must be >= 0")
    if not 0 < p.beam_halfwidth <= 180:
        problems.append("params.beam_halfwidth: must lie in (0, 180]")
    if p.radio_range <= 0:
        problems.append("params.radio_range: must be positive")
    if not 0 < p.rho <= 1:
        problems.append("params.rho: must lie in (0, 1]")
    elif rho_set is not None and not any(abs(p.rho - r) < 1e-9 for r in rho_set):
        problems.append(f"params.rho: {p.rho} not in configured set {tuple(rho_set)}")
    return problems
