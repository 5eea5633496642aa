"""Candidate pole lattice and antenna indexing."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .scenario import Scenario

RELAY = "relay"
SENSOR = "sensor"
GATEWAY = "gateway"


@dataclass(frozen=True)
class Pole:
    id: int
    x: float
    y: float
    kind: str
    cost: float = 0.0


@dataclass(frozen=True)
class Antenna:
    id: int
    pole: int
    orientation: int


@dataclass(frozen=True)
class CandidateSet:
    poles: tuple[Pole, ...]
    antennas: tuple[Antenna, ...]
    orientations: int

    def antenna_id(self, pole: int, orientation: int) -> int:
        """The antenna index of ``orientation`` on ``pole``."""
        return pole * self.orientations + orientation

    def azimuth(self, antenna: int) -> float:
        """Pointing direction in degrees, counter-clockwise from +x."""
        return (antenna % self.orientations) * 360.0 / self.orientations

    def of_kind(self, kind: str) -> list[int]:
        return [p.id for p in self.poles if p.kind == kind]

    def to_csv(self) -> str:
        lines = ["pole_id,kind,x,y,cost"]
        lines += [f"{p.id},{p.kind},{p.x!r},{p.y!r},{p.cost!r}" for p in self.poles]
        return "\n".join(lines) + "\n"


def lattice_axis(extent: float, cell_size: float, rho: float) -> list[float]:
    """Coordinates of lattice points along one axis.

    Points start at the first cell centre and advance by ``cell_size / rho``
    while strictly inside ``[0, extent)``.
    """
    pitch = cell_size / rho
    anchor = cell_size / 2.0
    if anchor >= extent:
        return []
    count = math.floor((extent - anchor) / pitch - 1e-9) + 1
    return [anchor + k * pitch for k in range(count)]


def _relay_cost(s: Scenario, x: float, y: float) -> float:
    if s.cost_raster is None:
        return float(s.params.pole_cost_base)
    rows, cols = s.cost_raster.shape
    r = min(int(y // s.cell_size), rows - 1)
    c = min(int(x // s.cell_size), cols - 1)
    return float(s.cost_raster[r, c])


def discretise(s: Scenario) -> CandidateSet:
    """Relay candidates on the lattice (row-major), then sensors, then gateways.

    Lattice points inside a forbidden placement box (edges included) or on
    top of a sensor or gateway are skipped.
    """
    rho = s.params.rho
    xs = lattice_axis(s.x_max, s.cell_size, rho)
    ys = lattice_axis(s.y_max, s.cell_size, rho)
    fixed = [(p.x, p.y) for p in s.sensors + s.gateways]
    poles = []
    for y in ys:
        for x in xs:
            if any(b.contains_xy(x, y) for b in s.forbidden_placement):
                continue
            # a sensor or gateway mast already stands here
            if any(abs(x - fx) < 1e-9 and abs(y - fy) < 1e-9 for fx, fy in fixed):
                continue
            poles.append(Pole(len(poles), x, y, RELAY, _relay_cost(s, x, y)))
    for p in s.sensors:
        poles.append(Pole(len(poles), p.x, p.y, SENSOR, 0.0))
    for p in s.gateways:
        poles.append(Pole(len(poles), p.x, p.y, GATEWAY, 0.0))

    n_or = s.params.orientations
    antennas = tuple(
        Antenna(v * n_or + o, v, o) for v in range(len(poles)) for o in range(n_or)
    )
    return CandidateSet(tuple(poles), antennas, n_or)
