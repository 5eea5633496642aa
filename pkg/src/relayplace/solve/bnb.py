"""Depth-first branch and bound for 0-1 models with non-negative costs."""

from __future__ import annotations

import math
import time

from ..model import Model01LP
from .engine import Propagator
from .result import SolverResult, Status

_TOL = 1e-9


def branch_and_bound(m: Model01LP, time_limit: float = math.inf) -> SolverResult:
    """Exact search: propagate, branch 1-first, prune on the incumbent cost.

    The bound at a node is the cost of variables already fixed to 1, valid
    because every objective coefficient is non-negative. Timeouts return the
    best incumbent found so far (if any) with status ``timeout``.
    """
    start = time.perf_counter()
    deadline = start + time_limit
    if any(c < 0 for c, _ in m.objective or ()):
        raise ValueError("branch_and_bound needs non-negative objective coefficients")
    feasibility = m.objective is None
    eng = Propagator(m)

    best = None
    best_cost = math.inf
    timed_out = False
    nodes = 0

    def done(status):
        assignment = None if best is None else dict(enumerate(best))
        obj = None if (best is None or feasibility) else m.objective_value(best)
        return SolverResult(status, obj, assignment, time.perf_counter() - start, "internal-bnb")

    if time.perf_counter() >= deadline:
        return done(Status.TIMEOUT)
    if not eng.propagate():
        return done(Status.UNSATISFIABLE)

    frames = []  # [variable, trail mark, value being tried]
    descend = True
    while True:
        if descend:
            nodes += 1
            if time.perf_counter() >= deadline:
                timed_out = True
                break
            if eng.fixed_cost >= best_cost - _TOL:
                descend = False
            else:
                b = eng.branch_variable()
                if b is None:
                    best = eng.completion()
                    best_cost = m.objective_value(best)
                    if feasibility:
                        break
                    descend = False
                else:
                    frames.append([b, len(eng.trail), 1])
                    descend = eng.assign(b, 1) and eng.propagate()
                    continue
        # backtrack to the deepest decision with an untried value
        while frames:
            b, mark, val = frames[-1]
            eng.undo_to(mark)
            if val == 1:
                frames[-1][2] = 0
                if eng.assign(b, 0) and eng.propagate():
                    descend = True
                    break
            else:
                frames.pop()
        if not frames and not descend:
            break

    if timed_out:
        status = Status.TIMEOUT
    elif best is None:
        status = Status.UNSATISFIABLE
    else:
        status = Status.SATISFIABLE if feasibility else Status.OPTIMAL
    res = done(status)
    res.output = f"nodes {nodes}"
    return res
