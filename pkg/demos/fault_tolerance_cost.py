"""
What fault tolerance costs
==========================

Solve one synthetic field at F = 0 and F = 1 and knock out every used relay
in turn to confirm the F = 1 network survives each single failure.
"""

from relayplace import build_model, build_visibility_graph, check_solution, discretise, fault_injection
from relayplace.solve import branch_and_bound
from relayplace.synth import synth_scenario
from relayplace.validate import Assignment

# a 40 m square with a hill, a hangar and a no-build zone; coarse lattice
field = synth_scenario(seed=1, size_class="tiny").with_params(rho=0.5)

for F in (0, 1):
    s = field.with_params(fault_tolerance=F)
    graph = build_visibility_graph(discretise(s), s)
    model = build_model(graph)
    result = branch_and_bound(model, time_limit=60)
    print(f"F={F}: {model.num_vars} variables -> {result.status}, cost {result.objective}")
    if not result.has_solution:
        continue
    a = Assignment.from_model(model, result.values(model.num_vars))
    report = check_solution(graph, model, a)
    relays = [v.id for v in graph.poles if v.kind == "relay" and a.get("P", v.id)]
    print(f"  relays bought: {relays}")
    for sensor, routes in report.paths.items():
        for i, route in enumerate(routes, start=1):
            hops = " -> ".join(str(graph.links[e].to_pole) for e in route)
            print(f"  sensor {sensor}, route {i}: {sensor} -> {hops}")
    failures = []
    fault_injection(graph, s.params, a, failures)
    print(f"  survives every removal of up to {F} relay(s): {not failures}")
