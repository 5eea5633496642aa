"""Optimal fault-tolerant relay placement as a 0-1 linear program."""

from .discretise import Antenna, CandidateSet, Pole, discretise
from .encode import encode_lp, encode_opb, encode_smt2, parse_model, write_instance
from .model import Model01LP, build_model, model_stats, to_feasibility
from .scenario import (
    AreaBox,
    FixedPole,
    Obstacle,
    Params,
    Scenario,
    ScenarioError,
    parse_scenario,
    serialize_scenario,
    validate_scenario,
)
from .solve import SolverResult, Status, branch_and_bound, brute_force, prune, run_external
from .validate import Assignment, ValidationReport, check_solution, fault_injection
from .visgraph import VisibilityGraph, build_visibility_graph, line_of_sight, link_feasible

__version__ = "0.1.0"

__all__ = [
    "Antenna",
    "AreaBox",
    "Assignment",
    "CandidateSet",
    "FixedPole",
    "Model01LP",
    "Obstacle",
    "Params",
    "Pole",
    "Scenario",
    "ScenarioError",
    "SolverResult",
    "Status",
    "ValidationReport",
    "VisibilityGraph",
    "branch_and_bound",
    "brute_force",
    "build_model",
    "build_visibility_graph",
    "check_solution",
    "discretise",
    "encode_lp",
    "encode_opb",
    "encode_smt2",
    "fault_injection",
    "line_of_sight",
    "link_feasible",
    "model_stats",
    "parse_model",
    "parse_scenario",
    "prune",
    "run_external",
    "serialize_scenario",
    "to_feasibility",
    "validate_scenario",
    "write_instance",
]
