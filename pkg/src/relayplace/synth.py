"""Seeded synthetic scenarios standing in for real airport survey data."""

from __future__ import annotations

import numpy as np

from .scenario import AreaBox, FixedPole, Obstacle, Params, Scenario, validate_scenario

SIZE_CLASSES = {
    # cells per side, cell size (m), pole counts, area counts, radio range (m), hop limit
    "tiny": dict(cells=4, cell=10.0, sensors=1, gateways=1, obstacles=1, forbid=1, flink=0, range=22.0, hops=3),
    "small": dict(cells=8, cell=25.0, sensors=2, gateways=1, obstacles=2, forbid=2, flink=1, range=80.0, hops=4),
    "medium": dict(cells=12, cell=25.0, sensors=3, gateways=2, obstacles=3, forbid=2, flink=1, range=60.0, hops=4),
}


def _box(rng, extent, min_w, max_w):
    w, h = rng.uniform(min_w, max_w, size=2)
    x0 = rng.uniform(0, extent - w)
    y0 = rng.uniform(0, extent - h)
    return [round(float(v), 1) for v in (x0, y0, x0 + w, y0 + h)]


def synth_scenario(seed: int, size_class: str = "tiny") -> Scenario:
    """Deterministic pseudo-random scenario of the given size class."""
    if size_class not in SIZE_CLASSES:
        raise ValueError(f"unknown size class {size_class!r}; choose from {sorted(SIZE_CLASSES)}")
    cfg = SIZE_CLASSES[size_class]
    rng = np.random.default_rng(seed)
    n, cell = cfg["cells"], cfg["cell"]
    extent = n * cell

    # smooth terrain: a few Gaussian hills
    yy, xx = np.mgrid[0:n, 0:n] + 0.5
    elevation = np.zeros((n, n))
    for _ in range(3):
        cx, cy = rng.uniform(0, n, size=2)
        height = rng.uniform(0.0, 4.0)
        width = rng.uniform(1.0, n / 2)
        elevation += height * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * width**2))
    elevation = np.round(elevation, 1)

    obstacles = []
    for _ in range(cfg["obstacles"]):
        x0, y0, x1, y1 = _box(rng, extent, cell * 0.3, cell * 0.8)
        obstacles.append(Obstacle(x0, y0, x1, y1, round(float(rng.uniform(8.0, 20.0)), 1)))
    forbidden = [AreaBox(*_box(rng, extent, cell * 0.5, cell * 1.5)) for _ in range(cfg["forbid"])]
    no_link = [
        AreaBox(*_box(rng, extent, cell * 0.5, cell), 0.0, 8.0) for _ in range(cfg["flink"])
    ]

    def free_point():
        while True:
            x, y = (round(float(v), 1) for v in rng.uniform(0.05 * extent, 0.95 * extent, size=2))
            if not any(b.contains_xy(x, y) for b in forbidden) and not any(
                o.contains_xy(x, y) for o in obstacles
            ):
                return x, y

    sensors = tuple(FixedPole(*free_point(), "sensor") for _ in range(cfg["sensors"]))
    gateways = tuple(FixedPole(*free_point(), "gateway") for _ in range(cfg["gateways"]))
    params = Params(
        fault_tolerance=1,
        max_hops=cfg["hops"],
        radio_range=cfg["range"],
        pole_cost_base=10.0,
        antenna_cost=1.0,
        link_penalty=0.0,
    )
    s = Scenario(
        x_max=extent,
        y_max=extent,
        cell_size=cell,
        elevation=elevation,
        sensors=sensors,
        gateways=gateways,
        obstacles=tuple(obstacles),
        forbidden_placement=tuple(forbidden),
        forbidden_link=tuple(no_link),
        pole_height=6.0,
        params=params,
    )
    problems = validate_scenario(s)
    if problems:  # coincident random points; astronomically rare, retry deterministically
        return synth_scenario(seed + 1_000_003, size_class)
    return s
