"""
One relay on a strip
====================

A sensor and a gateway stand 20 m apart, but the radios reach only 12 m.
The lattice offers a single relay pole half-way; the optimiser must buy it.
"""

from relayplace import build_model, build_visibility_graph, check_solution, discretise, parse_scenario
from relayplace.solve import branch_and_bound, brute_force

# the scenario file: a 30 m x 10 m strip of flat ground, omni antennas, unit costs
scenario = parse_scenario("""
ma 30 10 10
param fault_tolerance 0
param max_hops 2
param antenna_cost 1
param link_penalty 1
param pole_cost_base 1
param orientations 1
param beam_halfwidth 180
param radio_range 12
elevation
0 0 0
sensor 5 5
gateway 25 5
""")

# candidate poles: relays on the lattice, then the sensor, then the gateway
candidates = discretise(scenario)
for p in candidates.poles:
    print(f"pole {p.id}: {p.kind:8s} at ({p.x:g}, {p.y:g})  cost {p.cost:g}")

# every feasible radio link, in both directions
graph = build_visibility_graph(candidates, scenario)
for e in graph.links:
    print(f"link {e.id}: pole {e.from_pole} -> pole {e.to_pole}")

# the 0-1 program: 21 binary variables, small enough to enumerate outright
model = build_model(graph)
print(f"{model.num_vars} variables, {len(model.constraints)} constraints")

exact = brute_force(model)
fast = branch_and_bound(model)
print(f"enumeration: {exact.status} {exact.objective:g}; branch and bound: {fast.status} {fast.objective:g}")

# cost = relay pole (1) + three antennas (3) + two links (2)
report = check_solution(graph, model, fast.values(model.num_vars))
print(report.to_text())
