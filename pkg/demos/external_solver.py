"""
Handing the model to an outside solver
======================================

Write the three solver formats, then run a MILP adapter as a subprocess and
read its answer back through the line protocol. The adapter here is the
bundled stub (it solves with the internal engine); a real one would call a
MILP solver on the same .lp file.
"""

import sys
import tempfile
from pathlib import Path

from relayplace import build_model, build_visibility_graph, check_solution, discretise, write_instance
from relayplace.solve import run_external
from relayplace.synth import synth_scenario

s = synth_scenario(seed=1, size_class="tiny").with_params(rho=0.5, fault_tolerance=0)
graph = build_visibility_graph(discretise(s), s)
model = build_model(graph)

with tempfile.TemporaryDirectory() as tmp:
    files = write_instance(model, Path(tmp) / "tiny", ["lp", "opb", "smt2"])
    for f in files:
        print(f"{f.name:18s} {f.stat().st_size:7d} bytes")

    adapter = Path(__file__).parent / "adapters" / "milp_adapter_stub.py"
    varmap = {v.name: v.column for v in model.var_table}
    result = run_external(f"{sys.executable} {adapter} {{instance}}", Path(tmp) / "tiny.lp",
                          time_limit=60, kind="milp-lp", varmap=varmap)

print(f"adapter says: {result.status}, objective {result.objective}, {result.wall_time:.2f} s")
print("independent check:", "ok" if check_solution(graph, model, result.values(model.num_vars)).ok else "FAILED")

# for a pseudo-Boolean solver the call is the same with kind="pb" and the
# .opb file (objective_scale=10000); for an OMT solver, kind="omt" and .smt2
