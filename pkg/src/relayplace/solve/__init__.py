"""In-process exact solvers and the external solver harness."""

from .bnb import branch_and_bound
from .brute import MAX_VARS, brute_force
from .external import KINDS, parse_solver_output, run_external
from .presolve import Pruned, prune, solve_pruned
from .result import SolverResult, Status

__all__ = [
    "KINDS",
    "MAX_VARS",
    "Pruned",
    "SolverResult",
    "Status",
    "branch_and_bound",
    "brute_force",
    "parse_solver_output",
    "prune",
    "run_external",
    "solve_pruned",
]
