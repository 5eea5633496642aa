"""Independent solution checking and fault injection.

The checks here are rebuilt from the visibility graph and the problem
parameters; they never look at the model's constraint rows, so a wrong
encoding cannot certify its own output.
"""

from __future__ import annotations

import csv
import io
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Optional

from .discretise import GATEWAY, RELAY, SENSOR
from .model import FAMILIES, Model01LP
from .scenario import Params
from .visgraph import VisibilityGraph

COST_TOL = 1e-6
_ORDER = {f: k for k, f in enumerate(FAMILIES + ("cost",))}


@dataclass(frozen=True)
class Assignment:
    """A 0/1 value per model column, with the model's variable layout."""

    values: tuple
    columns: Mapping  # (kind, indices) -> column
    objective: Optional[float] = None

    @classmethod
    def from_model(cls, m: Model01LP, values) -> "Assignment":
        if isinstance(values, Mapping):
            dense = [0] * m.num_vars
            for j, v in values.items():
                dense[j] = int(v)
            values = dense
        values = tuple(int(v) for v in values)
        if len(values) != m.num_vars:
            raise ValueError(f"assignment has {len(values)} values, model has {m.num_vars} columns")
        if any(v not in (0, 1) for v in values):
            raise ValueError("assignment values must be 0 or 1")
        obj = None if m.objective is None else m.objective_value(values)
        return cls(values, m.column_of(), obj)

    def get(self, kind: str, *indices) -> int:
        col = self.columns.get((kind, indices))
        return 0 if col is None else self.values[col]


@dataclass(frozen=True)
class Violation:
    family: str
    indices: tuple
    message: str


@dataclass
class ValidationReport:
    ok: bool
    paths: dict  # sensor -> [[link ids of route 1], ...]
    violations: list = field(default_factory=list)
    recomputed_cost: float = 0.0

    def to_text(self) -> str:
        out = [f"valid: {'yes' if self.ok else 'no'}", f"cost: {self.recomputed_cost:g}"]
        for s, routes in self.paths.items():
            for i, route in enumerate(routes, start=1):
                out.append(f"sensor {s} route {i}: links {' '.join(map(str, route)) or '-'}")
        for v in self.violations:
            out.append(f"violation [{v.family}] {v.indices}: {v.message}")
        return "\n".join(out) + "\n"

    def violations_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["family", "indices", "message"])
        for v in self.violations:
            w.writerow([v.family, " ".join(map(str, v.indices)), v.message])
        return buf.getvalue()


def _limits(p: Params):
    return {
        GATEWAY: p.max_antennas_gateway,
        SENSOR: p.max_antennas_sensor,
        RELAY: p.max_antennas_relay,
    }


def check_solution(g: VisibilityGraph, m: Model01LP, a) -> ValidationReport:
    """Check assignment ``a`` (an :class:`Assignment` or column values) on ``g``."""
    if not isinstance(a, Assignment):
        a = Assignment.from_model(m, a)
    p = g.params
    F1, H = p.fault_tolerance + 1, p.max_hops
    links = g.links
    poles = g.poles
    n_or = g.candidates.orientations
    kind = {v.id: v.kind for v in poles}
    sensors = g.candidates.of_kind(SENSOR)
    bad: list[Violation] = []

    def flag(family, indices, message):
        bad.append(Violation(family, tuple(indices), message))

    paths = {}
    step_users = defaultdict(list)  # (e, j) -> [(s, i)]
    used_links = set()
    for s in sensors:
        routes = []
        entered = Counter()
        link_uses = Counter()
        for i in range(1, F1 + 1):
            steps = []
            for j in range(1, H + 1):
                chosen = [e.id for e in links if a.get("X", s, i, j, e.id)]
                if len(chosen) > 1:
                    flag("step_once", (s, i, j), f"{len(chosen)} links chosen at one step")
                for e in chosen:
                    step_users[(e, j)].append((s, i))
                    link_uses[e] += 1
                    used_links.add(e)
                    if kind[links[e].to_pole] == RELAY:
                        entered[links[e].to_pole] += 1
                    for ant in (links[e].from_antenna, links[e].to_antenna):
                        if not a.get("Y", s, ant):
                            flag("ant_link", (s, i, j, e), f"antenna {ant} carries the route but Y(s,a)=0")
                steps.append(chosen)
            route = []
            gap_at = None
            for j, chosen in enumerate(steps, start=1):
                if not chosen:
                    gap_at = gap_at or j
                    continue
                if gap_at is not None:
                    flag("path_end", (s, i, j), f"step {j} used after empty step {gap_at}")
                    continue
                route.append(chosen[0])
            routes.append(route)
            if not route:
                flag("flow_exit", (s, i), "route has no first link")
                continue
            first = links[route[0]]
            if first.from_pole != s:
                flag("flow_exit", (s, i), f"route starts at pole {first.from_pole}, not at the sensor")
            for j in range(1, len(route)):
                prev, nxt = links[route[j - 1]], links[route[j]]
                if kind[prev.to_pole] == GATEWAY:
                    flag("path_end", (s, i, j + 1), f"route continues after reaching gateway {prev.to_pole}")
                    break
                if nxt.from_pole != prev.to_pole:
                    flag("arc_order", (s, i, j), f"link {nxt.id} does not leave pole {prev.to_pole}")
            if kind[links[route[-1]].to_pole] != GATEWAY:
                flag("flow_enter", (s, i), f"route ends at pole {links[route[-1]].to_pole}, not a gateway")
        for e, k in sorted(link_uses.items()):
            if k > 1:
                flag("link_once", (s, e), f"link used {k} times by the sensor's routes")
        for n, k in sorted(entered.items()):
            if k > 1:
                flag("pole_once", (s, n), f"relay pole entered {k} times by the sensor's routes")
        paths[s] = routes

    for (e, j), users in sorted(step_users.items()):
        if len(users) > 1:
            flag("link_step", (e, j), f"link used at step {j} by {len(users)} routes")

    for s in sensors:
        for ant in g.antennas:
            if a.get("Y", s, ant.id) and not a.get("Z", ant.id):
                flag("ant_sensor", (s, ant.id), "antenna used for the sensor but not installed")
    for ant in g.antennas:
        if a.get("Z", ant.id) and not a.get("P", ant.pole):
            flag("ant_pole", (ant.id,), f"antenna installed on unused pole {ant.pole}")
    limits = _limits(p)
    for v in poles:
        count = sum(a.get("Z", v.id * n_or + o) for o in range(n_or))
        if count > limits[v.kind]:
            flag("ant_limit", (v.id,), f"{count} antennas on {v.kind} pole, limit {limits[v.kind]}")

    for e in links:
        u = a.get("U", e.id)
        if e.id in used_links and not u:
            flag("use_lb", (e.id,), "link carries traffic but U(e)=0")
        if u and e.id not in used_links:
            flag("use_ub", (e.id,), "U(e)=1 for a link no route uses")
    rx, tx = Counter(), Counter()
    for e in used_links:
        rx[links[e].to_pole] += 1
        tx[links[e].from_pole] += 1
    for v in poles:
        if rx[v.id] > p.max_links_per_pole:
            flag("rx_limit", (v.id,), f"{rx[v.id]} receiving links, limit {p.max_links_per_pole}")
    for v in poles:
        if tx[v.id] > p.max_links_per_pole:
            flag("tx_limit", (v.id,), f"{tx[v.id]} transmitting links, limit {p.max_links_per_pole}")

    n_x = sum(a.values[col] for (k, _), col in a.columns.items() if k == "X")
    cost = (
        sum(v.cost * a.get("P", v.id) for v in poles)
        + p.antenna_cost * sum(a.get("Z", ant.id) for ant in g.antennas)
        + p.link_penalty * n_x
    )
    if m.objective is not None:
        reported = m.objective_value(a.values)
        if abs(cost - reported) > COST_TOL:
            flag("cost", (), f"model objective {reported} differs from recomputed cost {cost}")

    bad.sort(key=lambda v: (_ORDER.get(v.family, len(_ORDER)), v.indices))
    return ValidationReport(not bad, paths, bad, float(cost))


def _reaches_gateway(g: VisibilityGraph, adj, source: int, removed: set, H: int) -> bool:
    kind = {v.id: v.kind for v in g.poles}
    depth = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if depth[u] == H:
            continue
        for w in adj[u]:
            if w in removed or w in depth:
                continue
            if kind[w] == GATEWAY:
                return True
            depth[w] = depth[u] + 1
            queue.append(w)
    return False


def fault_injection(g: VisibilityGraph, params: Params, a: Assignment, failures=None) -> bool:
    """Remove every set of at most F used relay poles and test reachability.

    A sensor survives a removal if some gateway is within ``max_hops`` links
    over links whose two antennas are installed and whose poles remain.
    ``failures``, if a list, collects ``(removed poles, sensor)`` pairs.
    """
    used = sorted(v.id for v in g.poles if v.kind == RELAY and a.get("P", v.id))
    adj = defaultdict(set)
    for e in g.links:
        if a.get("Z", e.from_antenna) and a.get("Z", e.to_antenna):
            adj[e.from_pole].add(e.to_pole)
    sensors = g.candidates.of_kind(SENSOR)
    ok = True
    for k in range(params.fault_tolerance + 1):
        for removed in combinations(used, k):
            gone = set(removed)
            for s in sensors:
                if not _reaches_gateway(g, adj, s, gone, params.max_hops):
                    ok = False
                    if failures is None:
                        return False
                    failures.append((removed, s))
    return ok
