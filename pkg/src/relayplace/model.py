"""The 0-1 linear program for fault-tolerant relay placement.

Variables (column order):

* ``X(s, i, j, e)`` -- step ``j`` of route ``i`` from sensor ``s`` uses link ``e``
* ``Y(s, a)``       -- antenna ``a`` carries traffic of sensor ``s``
* ``Z(a)``          -- antenna ``a`` is installed
* ``P(v)``          -- pole ``v`` is used
* ``U(e)``          -- link ``e`` is used by some route (counts radio channels)

Sensor indices are pole ids; ``i`` and ``j`` are 1-based.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Optional, Sequence

from .discretise import GATEWAY, RELAY, SENSOR
from .visgraph import VisibilityGraph

OBJECTIVE_SCALE = 10**4

# emission order of constraint families
FAMILIES = (
    "flow_exit",
    "flow_enter",
    "flow_balance",
    "arc_order",
    "path_end",
    "step_once",
    "link_once",
    "pole_once",
    "link_total",
    "link_step",
    "ant_link",
    "ant_sensor",
    "ant_pole",
    "ant_limit",
    "use_lb",
    "use_ub",
    "rx_limit",
    "tx_limit",
)

LE, GE, EQ = "<=", ">=", "="


@dataclass(frozen=True)
class VarRef:
    kind: str  # "X" | "Y" | "Z" | "P" | "U" | "other"
    indices: tuple
    column: int

    @property
    def name(self) -> str:
        return var_name(self.kind, self.indices)


def var_name(kind: str, indices: tuple) -> str:
    if kind == "X":
        s, i, j, e = indices
        return f"x_s{s}_i{i}_j{j}_e{e}"
    if kind == "Y":
        return f"y_s{indices[0]}_a{indices[1]}"
    if kind == "Z":
        return f"z_a{indices[0]}"
    if kind == "P":
        return f"p_v{indices[0]}"
    if kind == "U":
        return f"u_e{indices[0]}"
    return str(indices[0])


@dataclass(frozen=True)
class LinearConstraint:
    terms: tuple  # ((int coef, column), ...), columns ascending
    sense: str
    rhs: int
    family: str

    def activity(self, values: Sequence[int]) -> int:
        return sum(c * values[j] for c, j in self.terms)

    def satisfied(self, values: Sequence[int]) -> bool:
        act = self.activity(values)
        if self.sense == LE:
            return act <= self.rhs
        if self.sense == GE:
            return act >= self.rhs
        return act == self.rhs


def make_constraint(terms, sense, rhs, family) -> LinearConstraint:
    """Merge duplicate columns, drop zero coefficients, sort by column."""
    acc: dict[int, int] = defaultdict(int)
    for c, j in terms:
        acc[j] += c
    merged = tuple((c, j) for j, c in sorted(acc.items()) if c != 0)
    return LinearConstraint(merged, sense, int(rhs), family)


@dataclass(frozen=True)
class Model01LP:
    num_vars: int
    var_table: tuple  # tuple[VarRef, ...]
    constraints: tuple  # tuple[LinearConstraint, ...]
    objective: Optional[tuple] = None  # ((float coef, column), ...) or None

    @property
    def is_feasibility(self) -> bool:
        return self.objective is None

    def objective_value(self, values: Sequence[int]) -> float:
        if self.objective is None:
            return 0.0
        return float(sum(c * values[j] for c, j in self.objective))

    def violated(self, values: Sequence[int]) -> list[LinearConstraint]:
        return [con for con in self.constraints if not con.satisfied(values)]

    def is_feasible(self, values: Sequence[int]) -> bool:
        return all(con.satisfied(values) for con in self.constraints)

    def column_of(self) -> dict:
        """Map ``(kind, indices)`` to column."""
        return {(v.kind, v.indices): v.column for v in self.var_table}


class _Layout:
    """Column arithmetic for the fixed variable blocks."""

    def __init__(self, g: VisibilityGraph):
        self.sensors = g.candidates.of_kind(SENSOR)
        self.F = g.params.fault_tolerance
        self.H = g.params.max_hops
        self.nE = len(g.links)
        self.nA = len(g.antennas)
        self.nV = len(g.poles)
        self.nS = len(self.sensors)
        self.paths = self.F + 1
        self.nX = self.nS * self.paths * self.H * self.nE
        self.y0 = self.nX
        self.z0 = self.y0 + self.nS * self.nA
        self.p0 = self.z0 + self.nA
        self.u0 = self.p0 + self.nV
        self.num_vars = self.u0 + self.nE

    def x(self, sk, i, j, e):
        return ((sk * self.paths + (i - 1)) * self.H + (j - 1)) * self.nE + e

    def y(self, sk, a):
        return self.y0 + sk * self.nA + a

    def z(self, a):
        return self.z0 + a

    def p(self, v):
        return self.p0 + v

    def u(self, e):
        return self.u0 + e

    def var_table(self):
        refs = []
        for sk, s in enumerate(self.sensors):
            for i in range(1, self.paths + 1):
                for j in range(1, self.H + 1):
                    for e in range(self.nE):
                        refs.append(VarRef("X", (s, i, j, e), len(refs)))
        for s in self.sensors:
            for a in range(self.nA):
                refs.append(VarRef("Y", (s, a), len(refs)))
        refs += [VarRef("Z", (a,), self.z0 + a) for a in range(self.nA)]
        refs += [VarRef("P", (v,), self.p0 + v) for v in range(self.nV)]
        refs += [VarRef("U", (e,), self.u0 + e) for e in range(self.nE)]
        return tuple(refs)


def build_model(g: VisibilityGraph, flow_conservation: bool = True) -> Model01LP:
    """Generate variables, constraints and cost objective for graph ``g``.

    ``flow_conservation=False`` drops the relay flow-balance rows, which the
    path constraints already imply.
    """
    L = _Layout(g)
    p = g.params
    F1, H, E = L.paths, L.H, g.links
    kind = {pole.id: pole.kind for pole in g.poles}
    relays = [v for v in range(L.nV) if kind[v] == RELAY]
    is_gw = [kind[e.to_pole] == GATEWAY for e in E]
    out_of = defaultdict(list)
    into = defaultdict(list)
    for e in E:
        out_of[e.from_pole].append(e.id)
        into[e.to_pole].append(e.id)
    gw_links = [e.id for e in E if is_gw[e.id]]
    steps = range(1, H + 1)
    paths = range(1, F1 + 1)
    sensors = list(enumerate(L.sensors))
    cons = []
    add = cons.append

    # (a) flow exiting each sensor
    for sk, s in sensors:
        add(make_constraint([(1, L.x(sk, i, 1, e)) for i in paths for e in out_of[s]], EQ, F1, "flow_exit"))
    # (b) flow entering the gateways
    for sk, s in sensors:
        add(make_constraint(
            [(1, L.x(sk, i, j, e)) for i in paths for j in steps for e in gw_links],
            EQ, F1, "flow_enter"))
    # (c) flow balance at relays
    if flow_conservation:
        for sk, s in sensors:
            for n in relays:
                terms = [(1, L.x(sk, i, j, e)) for i in paths for j in steps for e in into[n]]
                terms += [(-1, L.x(sk, i, j, e)) for i in paths for j in steps for e in out_of[n]]
                add(make_constraint(terms, EQ, 0, "flow_balance"))
    # (d) arc order
    for sk, s in sensors:
        for i in paths:
            for j in range(1, H):
                for e in E:
                    if is_gw[e.id]:
                        continue
                    terms = [(1, L.x(sk, i, j + 1, f)) for f in out_of[e.to_pole]]
                    terms.append((-1, L.x(sk, i, j, e.id)))
                    add(make_constraint(terms, GE, 0, "arc_order"))
    # (e) nothing after a gateway is reached
    big_m = H * L.nE
    for sk, s in sensors:
        for i in paths:
            for j in range(1, H):
                terms = [(1, L.x(sk, i, k, e)) for k in range(j + 1, H + 1) for e in range(L.nE)]
                terms += [(big_m, L.x(sk, i, j, e)) for e in gw_links]
                add(make_constraint(terms, LE, big_m, "path_end"))
    # (f) one link per step; a link at most once per sensor
    for sk, s in sensors:
        for i in paths:
            for j in steps:
                add(make_constraint([(1, L.x(sk, i, j, e)) for e in range(L.nE)], LE, 1, "step_once"))
    for sk, s in sensors:
        for e in range(L.nE):
            add(make_constraint([(1, L.x(sk, i, j, e)) for i in paths for j in steps], LE, 1, "link_once"))
    # (g) relay poles are node-disjoint across a sensor's routes
    for sk, s in sensors:
        for n in relays:
            add(make_constraint(
                [(1, L.x(sk, i, j, e)) for i in paths for j in steps for e in into[n]],
                LE, 1, "pole_once"))
    # (h) global link use
    for e in range(L.nE):
        add(make_constraint(
            [(1, L.x(sk, i, j, e)) for sk, _ in sensors for i in paths for j in steps],
            LE, L.nS * F1, "link_total"))
    for e in range(L.nE):
        for j in steps:
            add(make_constraint([(1, L.x(sk, i, j, e)) for sk, _ in sensors for i in paths], LE, 1, "link_step"))
    # (i) antenna activation chain
    for sk, s in sensors:
        for i in paths:
            for j in steps:
                for e in E:
                    x = L.x(sk, i, j, e.id)
                    add(make_constraint([(1, L.y(sk, e.from_antenna)), (-1, x)], GE, 0, "ant_link"))
                    add(make_constraint([(1, L.y(sk, e.to_antenna)), (-1, x)], GE, 0, "ant_link"))
    for sk, s in sensors:
        for a in range(L.nA):
            add(make_constraint([(1, L.y(sk, a)), (-1, L.z(a))], LE, 0, "ant_sensor"))
    for ant in g.antennas:
        add(make_constraint([(1, L.z(ant.id)), (-1, L.p(ant.pole))], LE, 0, "ant_pole"))
    # (j) antenna limits per pole kind
    limit = {
        GATEWAY: p.max_antennas_gateway,
        SENSOR: p.max_antennas_sensor,
        RELAY: p.max_antennas_relay,
    }
    n_or = g.candidates.orientations
    for v in range(L.nV):
        add(make_constraint([(1, L.z(v * n_or + o)) for o in range(n_or)], LE, limit[kind[v]], "ant_limit"))
    # (k) link (channel) limits via use(e)
    for sk, s in sensors:
        for i in paths:
            for j in steps:
                for e in range(L.nE):
                    add(make_constraint([(1, L.u(e)), (-1, L.x(sk, i, j, e))], GE, 0, "use_lb"))
    for e in range(L.nE):
        terms = [(1, L.u(e))]
        terms += [(-1, L.x(sk, i, j, e)) for sk, _ in sensors for i in paths for j in steps]
        add(make_constraint(terms, LE, 0, "use_ub"))
    for v in range(L.nV):
        add(make_constraint([(1, L.u(e)) for e in into[v]], LE, p.max_links_per_pole, "rx_limit"))
    for v in range(L.nV):
        add(make_constraint([(1, L.u(e)) for e in out_of[v]], LE, p.max_links_per_pole, "tx_limit"))

    obj = []
    if p.link_penalty:
        obj += [(float(p.link_penalty), c) for c in range(L.nX)]
    if p.antenna_cost:
        obj += [(float(p.antenna_cost), L.z(a)) for a in range(L.nA)]
    obj += [(float(pole.cost), L.p(pole.id)) for pole in g.poles if pole.cost]

    return Model01LP(L.num_vars, L.var_table(), tuple(cons), tuple(obj))


def scale_objective(objective, scale: int = OBJECTIVE_SCALE) -> tuple:
    """Integer objective: each coefficient times ``scale``, rounded half-to-even."""
    return tuple((int(round(c * scale)), j) for c, j in objective)


def to_feasibility(m: Model01LP, budget: Optional[float] = None) -> Model01LP:
    """Drop the objective; optionally require cost <= ``budget``.

    The budget row uses the integer-scaled objective, with right-hand side
    ``floor(budget * OBJECTIVE_SCALE)``.
    """
    if m.objective is None:
        raise ValueError("model has no objective")
    cons = m.constraints
    if budget is not None:
        if budget < 0:
            raise ValueError("budget must be non-negative")
        rhs = math.floor(budget * OBJECTIVE_SCALE + 1e-7)
        terms = [(c, j) for c, j in scale_objective(m.objective) if c]
        cons = cons + (make_constraint(terms, LE, rhs, "budget"),)
    return Model01LP(m.num_vars, m.var_table, cons, None)


@dataclass(frozen=True)
class ModelStats:
    num_vars: int
    num_constraints: int
    families: dict
    variables: dict


def model_stats(m: Model01LP) -> ModelStats:
    fam = Counter(c.family for c in m.constraints)
    ordered = {f: fam[f] for f in FAMILIES if f in fam}
    ordered.update({f: n for f, n in fam.items() if f not in ordered})
    kinds = Counter(v.kind for v in m.var_table)
    return ModelStats(m.num_vars, len(m.constraints), ordered, dict(kinds))


def expected_counts(n_sensors, n_relays, n_poles, n_antennas, n_links, n_gw_links, F, H):
    """Closed-form variable and per-family constraint counts of :func:`build_model`.

    ``n_gw_links`` is the number of links whose receiving pole is a gateway.
    """
    S, paths = n_sensors, F + 1
    nX = S * paths * H * n_links
    variables = {"X": nX, "Y": S * n_antennas, "Z": n_antennas, "P": n_poles, "U": n_links}
    families = {
        "flow_exit": S,
        "flow_enter": S,
        "flow_balance": S * n_relays,
        "arc_order": S * paths * (H - 1) * (n_links - n_gw_links),
        "path_end": S * paths * (H - 1),
        "step_once": S * paths * H,
        "link_once": S * n_links,
        "pole_once": S * n_relays,
        "link_total": n_links,
        "link_step": n_links * H,
        "ant_link": 2 * nX,
        "ant_sensor": S * n_antennas,
        "ant_pole": n_antennas,
        "ant_limit": n_poles,
        "use_lb": nX,
        "use_ub": n_links,
        "rx_limit": n_poles,
        "tx_limit": n_poles,
    }
    return variables, families
