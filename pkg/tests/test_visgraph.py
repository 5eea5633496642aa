import math

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from relayplace import build_visibility_graph, discretise, line_of_sight, link_feasible
from relayplace.visgraph import segment_hits_box, terrain_height
from relayplace.scenario import AreaBox

from _support import flat, load


def dense_oracle(s, p, q, step):
    """Independent LOS test: scipy interpolation, sampling ``step`` apart."""
    rows, cols = s.elevation.shape
    cx = (np.arange(cols) + 0.5) * s.cell_size
    cy = (np.arange(rows) + 0.5) * s.cell_size
    interp = RegularGridInterpolator((cy, cx), s.elevation, method="linear")

    def ground(x, y):
        return interp(np.column_stack([np.clip(y, cy[0], cy[-1]), np.clip(x, cx[0], cx[-1])]))

    p3 = np.array([p[0], p[1], ground([p[0]], [p[1]])[0] + s.pole_height])
    q3 = np.array([q[0], q[1], ground([q[0]], [q[1]])[0] + s.pole_height])
    n = max(1, math.ceil(math.dist(p, q) / step))
    t = np.linspace(0, 1, n + 1)
    pts = p3 + t[:, None] * (q3 - p3)
    g = ground(pts[:, 0], pts[:, 1])
    blocked = g > pts[:, 2]
    for o in s.obstacles:
        inside = (pts[:, 0] >= o.x0) & (pts[:, 0] <= o.x1) & (pts[:, 1] >= o.y0) & (pts[:, 1] <= o.y1)
        blocked |= inside & (g + o.height > pts[:, 2])
    return t, blocked


def test_terrain_matches_scipy_interpolation():
    rng = np.random.default_rng(3)
    s = flat(7, 5)
    import dataclasses
    s = dataclasses.replace(s, elevation=rng.uniform(0, 20, size=(5, 7)))
    xs, ys = rng.uniform(0, 70, 500), rng.uniform(0, 50, 500)
    cx, cy = np.arange(7) * 10 + 5.0, np.arange(5) * 10 + 5.0
    interp = RegularGridInterpolator((cy, cx), s.elevation)
    want = interp(np.column_stack([np.clip(ys, 5, 45), np.clip(xs, 5, 65)]))
    np.testing.assert_allclose(terrain_height(s, xs, ys), want, atol=1e-9)


def test_flat_ground_never_blocks():
    s = flat(5, 5)
    rng = np.random.default_rng(0)
    for _ in range(50):
        p, q = rng.uniform(0, 50, 2), rng.uniform(0, 50, 2)
        assert line_of_sight(p, q, s)


def test_tall_obstacle_between_poles_blocks():
    s = flat(5, 1, obstacles=[(22, 0, 28, 10, 50)])
    assert not line_of_sight((5, 5), (45, 5), s)
    assert line_of_sight((5, 5), (15, 5), s)


def test_obstacle_lower_than_the_segment_does_not_block():
    s = flat(5, 1, obstacles=[(22, 0, 28, 10, 5.9)])
    assert line_of_sight((5, 5), (45, 5), s)


def test_explicit_3d_points():
    s = flat(3, 1)
    assert line_of_sight((5, 5, 1.0), (25, 5, 1.0), s)
    assert not line_of_sight((5, 5, -1.0), (25, 5, 1.0), s)


def test_slab_test():
    box = AreaBox(10, 10, 20, 20, 0, 5)
    assert segment_hits_box((0, 15, 3), (30, 15, 3), box)
    assert not segment_hits_box((0, 15, 6), (30, 15, 6), box)  # passes over
    assert not segment_hits_box((0, 0, 3), (5, 30, 3), box)  # passes beside
    assert segment_hits_box((0, 10, 5), (30, 10, 5), box)  # grazes the closed edge


def facing_pair(**params):
    s = flat(2, 1, sensors=[(5, 5)], gateways=[(15, 5)], radio_range=100, **params)
    return s, discretise(s)


def test_facing_antennas_link():
    s, cs = facing_pair()
    sensor, gateway = cs.of_kind("sensor")[0], cs.of_kind("gateway")[0]
    # orientation 0 points at +x (towards the gateway), orientation 2 at -x
    assert link_feasible(cs.antenna_id(sensor, 0), cs.antenna_id(gateway, 2), s, cs)
    assert not link_feasible(cs.antenna_id(sensor, 2), cs.antenna_id(gateway, 2), s, cs)


def test_forbidden_link_volume_cuts_the_link():
    s, cs = facing_pair()
    import dataclasses
    s = dataclasses.replace(s, forbidden_link=(AreaBox(8, 0, 12, 10, 0, 100),))
    sensor, gateway = cs.of_kind("sensor")[0], cs.of_kind("gateway")[0]
    assert not link_feasible(cs.antenna_id(sensor, 0), cs.antenna_id(gateway, 2), s, cs)


def test_sensor_and_gateway_have_exactly_two_links():
    s, cs = facing_pair()
    # oracle: hand-enumerate all 16 ordered antenna pairs
    g = build_visibility_graph(cs, s)
    ends = [(e.from_antenna, e.to_antenna) for e in g.links]
    assert ends == [(0, 6), (6, 0)]
    assert [(e.from_pole, e.to_pole) for e in g.links] == [(0, 1), (1, 0)]


def test_all_forbidden_area_has_no_links():
    s = flat(4, 4, sensors=[(5, 5)], gateways=[(35, 35)], flink=[(0, 0, 40, 40, -100, 100)])
    assert build_visibility_graph(discretise(s), s).links == ()


def test_three_collinear_poles_with_short_range():
    s = flat(3, 1, sensors=[(5, 5)], gateways=[(25, 5)], orientations=1,
             beam_halfwidth=180, radio_range=12)
    cs = discretise(s)
    g = build_visibility_graph(cs, s)
    pairs = sorted((e.from_pole, e.to_pole) for e in g.links)
    # brute-force pairwise check: only neighbours 10 m apart are in range
    expect = sorted((u, v) for u in range(3) for v in range(3)
                    if u != v and abs(cs.poles[u].x - cs.poles[v].x) <= 12)
    assert pairs == expect and len(pairs) == 4


def test_link_invariants_and_thread_pool_agree():
    s = load("airfield10.scn")
    cs = discretise(s.with_params(rho=0.5))
    g1 = build_visibility_graph(cs, s)
    g4 = build_visibility_graph(cs, s, jobs=4)
    assert g1.links == g4.links
    assert [e.id for e in g1.links] == list(range(len(g1.links)))
    seen = set()
    for e in g1.links:
        assert cs.antennas[e.from_antenna].pole == e.from_pole
        assert cs.antennas[e.to_antenna].pole == e.to_pole
        assert e.from_pole != e.to_pole
        assert (e.from_antenna, e.to_antenna) not in seen
        seen.add((e.from_antenna, e.to_antenna))
        assert link_feasible(e.from_antenna, e.to_antenna, s, cs)
    # links come in geometric pairs: if a->b is feasible, the mirrored b->a pair is too
    assert seen == {(b, a) for a, b in seen}
    assert g1.to_csv().splitlines()[0] == "link_id,tau,sigma,alpha,beta"


def test_random_terrain_matches_dense_oracle():
    rng = np.random.default_rng(11)
    import dataclasses
    s = dataclasses.replace(flat(16, 16), elevation=rng.uniform(0, 8, (16, 16)))
    step = s.cell_size / 4
    agree = 0
    for _ in range(200):
        p, q = rng.uniform(0, 160, 2), rng.uniform(0, 160, 2)
        _, blocked = dense_oracle(s, p, q, step / 10)
        agree += line_of_sight(p, q, s) == (not blocked.any())
    assert agree >= 198
