"""
Instance size against lattice density
=====================================

The scalability question: how many poles, links and constraints does a
medium field produce as the discretisation factor rho falls from 100% to
40%? The table is written as CSV for plotting elsewhere.
"""

import csv
import sys

import numpy as np

from relayplace import build_model, build_visibility_graph, discretise, model_stats
from relayplace.synth import synth_scenario

field = synth_scenario(seed=1, size_class="medium")
rhos = np.round(np.arange(1.0, 0.35, -0.1), 1)

writer = csv.writer(sys.stdout)
writer.writerow(["rho", "F", "poles", "links", "variables", "constraints"])
for rho in rhos:
    for F in (0, 1):
        s = field.with_params(rho=float(rho), fault_tolerance=F)
        cs = discretise(s)
        graph = build_visibility_graph(cs, s)
        st = model_stats(build_model(graph))
        writer.writerow([rho, F, len(cs.poles), len(graph.links), st.num_vars, st.num_constraints])

# the same numbers, bench-style, come from the command line:
#   relayplace synth --seed 1 --size medium -o medium.scn
#   relayplace bench medium.scn --fault-tolerance 0,1 --time-limit 5 -o bench.csv
