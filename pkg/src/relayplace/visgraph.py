"""Radio visibility graph: which antenna pairs can form a directed radio link."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .discretise import CandidateSet
from .scenario import AreaBox, Params, Scenario

_ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class Link:
    id: int
    from_pole: int  # tau
    to_pole: int  # sigma
    from_antenna: int  # alpha
    to_antenna: int  # beta


@dataclass(frozen=True)
class VisibilityGraph:
    candidates: CandidateSet
    links: tuple[Link, ...]
    params: Params

    @property
    def poles(self):
        return self.candidates.poles

    @property
    def antennas(self):
        return self.candidates.antennas

    def to_csv(self) -> str:
        lines = ["link_id,tau,sigma,alpha,beta"]
        lines += [
            f"{e.id},{e.from_pole},{e.to_pole},{e.from_antenna},{e.to_antenna}"
            for e in self.links
        ]
        return "\n".join(lines) + "\n"


def terrain_height(s: Scenario, x, y):
    """Bilinear interpolation of the elevation grid between cell centres.

    Outside the ring of cell centres the nearest edge value is held constant.
    Accepts scalars or arrays.
    """
    grid = np.asarray(s.elevation, dtype=float)
    rows, cols = grid.shape
    fx = np.clip(np.asarray(x, dtype=float) / s.cell_size - 0.5, 0.0, cols - 1)
    fy = np.clip(np.asarray(y, dtype=float) / s.cell_size - 0.5, 0.0, rows - 1)
    c0 = np.minimum(np.floor(fx).astype(int), max(cols - 2, 0))
    r0 = np.minimum(np.floor(fy).astype(int), max(rows - 2, 0))
    c1 = np.minimum(c0 + 1, cols - 1)
    r1 = np.minimum(r0 + 1, rows - 1)
    tx = fx - c0
    ty = fy - r0
    top = grid[r0, c0] * (1 - tx) + grid[r0, c1] * tx
    bottom = grid[r1, c0] * (1 - tx) + grid[r1, c1] * tx
    return top * (1 - ty) + bottom * ty


def antenna_point(s: Scenario, x: float, y: float) -> tuple[float, float, float]:
    return (x, y, float(terrain_height(s, x, y)) + s.pole_height)


def _as_point3(s: Scenario, p):
    if len(p) == 3:
        return tuple(float(v) for v in p)
    return antenna_point(s, float(p[0]), float(p[1]))


def segment_samples(p, q, step: float) -> np.ndarray:
    """Parameters t in [0, 1] sampling p->q at most ``step`` apart in the plane."""
    length = math.hypot(q[0] - p[0], q[1] - p[1])
    n = max(1, math.ceil(length / step - 1e-12))
    return np.linspace(0.0, 1.0, n + 1)


def line_of_sight(p, q, s: Scenario, step: float | None = None) -> bool:
    """True if the straight segment p->q clears terrain and obstacles.

    ``p`` and ``q`` are (x, y) pole positions, raised to ground + pole height,
    or explicit (x, y, z) points. The segment is tested at sample points no
    more than ``step`` apart (default a quarter cell) plus both endpoints.
    """
    p = _as_point3(s, p)
    q = _as_point3(s, q)
    if step is None:
        step = s.cell_size / 4.0
    t = segment_samples(p, q, step)
    xs = p[0] + t * (q[0] - p[0])
    ys = p[1] + t * (q[1] - p[1])
    zs = p[2] + t * (q[2] - p[2])
    ground = terrain_height(s, xs, ys)
    if np.any(ground > zs):
        return False
    for o in s.obstacles:
        inside = (xs >= o.x0) & (xs <= o.x1) & (ys >= o.y0) & (ys <= o.y1)
        if np.any(inside & (ground + o.height > zs)):
            return False
    return True


def segment_hits_box(p, q, box: AreaBox) -> bool:
    """Slab test of the closed 3-D segment p->q against a closed box.

    Missing z bounds make the box unbounded vertically.
    """
    lo = (box.x0, box.y0, -math.inf if box.z0 is None else box.z0)
    hi = (box.x1, box.y1, math.inf if box.z1 is None else box.z1)
    t0, t1 = 0.0, 1.0
    for k in range(3):
        d = q[k] - p[k]
        if abs(d) < 1e-15:
            if p[k] < lo[k] or p[k] > hi[k]:
                return False
            continue
        ta = (lo[k] - p[k]) / d
        tb = (hi[k] - p[k]) / d
        if ta > tb:
            ta, tb = tb, ta
        t0 = max(t0, ta)
        t1 = min(t1, tb)
        if t0 > t1:
            return False
    return True


def _angle_diff(a: float, b: float) -> float:
    d = (a - b) % 360.0
    return min(d, 360.0 - d)


def _bearing(p, q) -> float:
    return math.degrees(math.atan2(q[1] - p[1], q[0] - p[0])) % 360.0


def _pair_clear(p, q, s: Scenario) -> bool:
    """Orientation-independent link conditions: range, LOS, forbidden volumes."""
    if math.dist(p, q) > s.params.radio_range or math.dist(p[:2], q[:2]) == 0.0:
        return False
    if any(segment_hits_box(p, q, b) for b in s.forbidden_link):
        return False
    return line_of_sight(p, q, s)


def _beam_ok(cs: CandidateSet, antenna: int, bearing: float, halfwidth: float) -> bool:
    return _angle_diff(bearing, cs.azimuth(antenna)) <= halfwidth + _ANGLE_TOL


def link_feasible(a1: int, a2: int, s: Scenario, cs: CandidateSet) -> bool:
    """Whether antenna ``a1`` can transmit to antenna ``a2``."""
    v1 = cs.antennas[a1].pole
    v2 = cs.antennas[a2].pole
    if v1 == v2:
        return False
    P1, P2 = cs.poles[v1], cs.poles[v2]
    p = antenna_point(s, P1.x, P1.y)
    q = antenna_point(s, P2.x, P2.y)
    hw = s.params.beam_halfwidth
    if not _beam_ok(cs, a1, _bearing(p, q), hw):
        return False
    if not _beam_ok(cs, a2, _bearing(q, p), hw):
        return False
    return _pair_clear(p, q, s)


def build_visibility_graph(cs: CandidateSet, s: Scenario, jobs: int = 1) -> VisibilityGraph:
    """All feasible ordered antenna pairs, in (from_antenna, to_antenna) order.

    Pole pairs are checked once per unordered pair (the geometric test is
    symmetric); ``jobs > 1`` spreads those checks over a thread pool without
    changing the output.
    """
    pts = [antenna_point(s, p.x, p.y) for p in cs.poles]
    n = len(pts)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]

    def check(pair):
        u, v = pair
        return _pair_clear(pts[u], pts[v], s)

    if jobs > 1 and len(pairs) > 64:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            clear = list(pool.map(check, pairs, chunksize=256))
    else:
        clear = [check(pr) for pr in pairs]

    hw = s.params.beam_halfwidth
    n_or = cs.orientations
    found = []
    for (u, v), ok in zip(pairs, clear):
        if not ok:
            continue
        b_uv = _bearing(pts[u], pts[v])
        b_vu = _bearing(pts[v], pts[u])
        au = [cs.antenna_id(u, o) for o in range(n_or) if _beam_ok(cs, cs.antenna_id(u, o), b_uv, hw)]
        av = [cs.antenna_id(v, o) for o in range(n_or) if _beam_ok(cs, cs.antenna_id(v, o), b_vu, hw)]
        for a in au:
            for b in av:
                found.append((a, b))
                found.append((b, a))
    found.sort()
    per_pole = cs.orientations
    links = tuple(
        Link(k, a // per_pole, b // per_pole, a, b) for k, (a, b) in enumerate(found)
    )
    return VisibilityGraph(cs, links, s.params)
