"""Reference adapter for the MILP line protocol.

A real adapter wraps a MILP solver: it reads the CPLEX-LP instance given on
the command line, runs the solver, and prints

    STATUS optimal|satisfiable|unsatisfiable|timeout
    OBJ <real>
    VAR <name> <0|1>

This stub stands in for the solver with the package's own branch and bound,
so the external-engine path can be exercised without third-party software:

    relayplace solve scenario.scn --solver-kind milp-lp \
        --engine "python3 demos/adapters/milp_adapter_stub.py {instance}"
"""

import sys
from pathlib import Path

from relayplace.encode import parse_model
from relayplace.solve import branch_and_bound


def main(path):
    m = parse_model(Path(path).read_text(), "lp")
    res = branch_and_bound(m)
    print(f"STATUS {res.status.value}")
    if res.objective is not None:
        print(f"OBJ {res.objective:.10g}")
    if res.assignment is not None:
        for v in m.var_table:
            print(f"VAR {v.name} {res.assignment.get(v.column, 0)}")


if __name__ == "__main__":
    main(sys.argv[1])
