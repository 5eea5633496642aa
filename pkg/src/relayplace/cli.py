"""Command-line front end: ``relayplace <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

from .discretise import discretise
from .encode import (
    encode_lp,
    encode_opb,
    encode_smt2,
    parse_model,
    read_varmap,
    write_instance,
)
from .model import OBJECTIVE_SCALE, build_model, model_stats, to_feasibility
from .scenario import ScenarioError, parse_scenario, serialize_scenario, validate_scenario
from .solve import Status, branch_and_bound, run_external
from .synth import SIZE_CLASSES, synth_scenario
from .validate import Assignment, check_solution, fault_injection
from .visgraph import build_visibility_graph

EXIT_CODES = {
    Status.OPTIMAL: 0,
    Status.SATISFIABLE: 10,
    Status.UNSATISFIABLE: 20,
    Status.TIMEOUT: 124,
    Status.ERROR: 1,
}
BENCH_COLUMNS = ["scenario", "rho", "F", "num_constraints", "engine", "status", "objective", "wall_time"]
_KIND_FORMAT = {"pb": "opb", "omt": "smt2", "milp-lp": "lp"}


def _floats(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text):
    return [int(t) for t in text.split(",") if t.strip()]


def load_scenario(path, rho=None, fault_tolerance=None, hops=None):
    s = parse_scenario(Path(path).read_text())
    changes = {}
    if rho is not None:
        changes["rho"] = rho
    if fault_tolerance is not None:
        changes["fault_tolerance"] = fault_tolerance
    if hops is not None:
        changes["max_hops"] = hops
    if changes:
        s = s.with_params(**changes)
    problems = validate_scenario(s)
    if problems:
        raise ScenarioError(f"{path}: " + "; ".join(problems))
    return s


def pipeline(s, jobs=1):
    """Scenario -> (candidates, visibility graph, model)."""
    cs = discretise(s)
    g = build_visibility_graph(cs, s, jobs=jobs)
    return cs, g, build_model(g)


def smt_objective_scale(m) -> int:
    """Scale factor the SMT encoder applies to ``m``'s objective."""
    if m.objective is None or all(float(c).is_integer() for c, _ in m.objective):
        return 1
    return OBJECTIVE_SCALE


def read_assignment(text: str, varmap: dict) -> dict:
    """Read ``name value`` lines (adapter ``VAR`` lines accepted) into column -> value."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts or parts[0] in ("STATUS", "OBJ") or parts[0].startswith("#"):
            continue
        if parts[0] == "VAR":
            parts = parts[1:]
        if len(parts) != 2 or parts[1] not in ("0", "1"):
            raise ValueError(f"line {lineno}: expected '<name> <0|1>'")
        if parts[0] not in varmap:
            raise ValueError(f"line {lineno}: unknown variable {parts[0]!r}")
        out[varmap[parts[0]]] = int(parts[1])
    return out


def write_assignment(m, values) -> str:
    return "".join(f"{v.name} {int(values.get(v.column, 0))}\n" for v in m.var_table)


def solve_model(m, engine="internal", time_limit=60.0, kind="pb"):
    """Solve with the internal branch and bound or an external command template."""
    if engine == "internal":
        return branch_and_bound(m, time_limit)
    fmt = _KIND_FORMAT[kind]
    encoder = {"opb": encode_opb, "smt2": encode_smt2, "lp": encode_lp}[fmt]
    scale = {"opb": OBJECTIVE_SCALE, "smt2": smt_objective_scale(m), "lp": 1}[fmt]
    varmap = {v.name: v.column for v in m.var_table}
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / f"instance.{fmt}"
        path.write_text(encoder(m))
        return run_external(engine, path, time_limit, kind=kind, varmap=varmap, objective_scale=scale)


def cmd_synth(args):
    s = synth_scenario(args.seed, args.size)
    text = serialize_scenario(s)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_build(args):
    rhos = _floats(args.rho) if args.rho else [None]
    faults = _ints(args.fault_tolerance) if args.fault_tolerance else [None]
    first = True
    for rho in rhos:
        for F in faults:
            s = load_scenario(args.scenario, rho, F, args.hops)
            cs, g, m = pipeline(s, args.jobs)
            if first and args.candidates_csv:
                Path(args.candidates_csv).write_text(cs.to_csv())
            if first and args.graph_csv:
                Path(args.graph_csv).write_text(g.to_csv())
            first = False
            st = model_stats(m)
            record = {
                "scenario": Path(args.scenario).stem,
                "rho": s.params.rho,
                "F": s.params.fault_tolerance,
                "H": s.params.max_hops,
                "poles": len(cs.poles),
                "antennas": len(cs.antennas),
                "links": len(g.links),
                **asdict(st),
            }
            print(json.dumps(record, sort_keys=False))
    return 0


def cmd_encode(args):
    s = load_scenario(args.scenario, args.rho, args.fault_tolerance, args.hops)
    _, _, m = pipeline(s, args.jobs)
    if args.feasibility or args.budget is not None:
        m = to_feasibility(m, args.budget)
    formats = [f.strip() for f in args.format.split(",") if f.strip()]
    stem = args.output or Path(args.scenario).with_suffix("")
    for path in write_instance(m, stem, formats):
        print(path)
    return 0


def cmd_solve(args):
    path = Path(args.input)
    g = None
    if path.suffix in (".lp", ".opb"):
        varmap = None
        vm = path.with_name(path.stem + ".varmap.csv")
        if vm.exists():
            varmap = read_varmap(vm.read_text())
        m = parse_model(path.read_text(), path.suffix[1:], varmap)
    else:
        s = load_scenario(path, args.rho, args.fault_tolerance, args.hops)
        _, g, m = pipeline(s, args.jobs)
    res = solve_model(m, args.engine, args.time_limit, args.solver_kind)
    print(f"status: {res.status}")
    if res.objective is not None:
        print(f"objective: {res.objective:g}")
    print(f"wall_time: {res.wall_time:.3f}")
    if res.status == Status.ERROR and res.output:
        print(res.output, file=sys.stderr)
    if res.assignment is not None:
        if args.assignment_out:
            Path(args.assignment_out).write_text(write_assignment(m, res.assignment))
        if g is not None:
            report = check_solution(g, m, res.values(m.num_vars))
            print(f"validated: {'yes' if report.ok else 'no'}")
    return EXIT_CODES[res.status]


def cmd_validate(args):
    s = load_scenario(args.scenario, args.rho, args.fault_tolerance, args.hops)
    _, g, m = pipeline(s, args.jobs)
    varmap = {v.name: v.column for v in m.var_table}
    values = read_assignment(Path(args.assignment).read_text(), varmap)
    a = Assignment.from_model(m, values)
    report = check_solution(g, m, a)
    sys.stdout.write(report.to_text())
    ok = report.ok
    if ok:
        survived = fault_injection(g, s.params, a)
        print(f"fault tolerance F={s.params.fault_tolerance}: {'holds' if survived else 'FAILS'}")
        ok = survived
    if args.csv:
        Path(args.csv).write_text(report.violations_csv())
    return 0 if ok else 1


def _bench_cell(task):
    scenario_path, rho, F, hops, engines, time_limit, kind = task
    name = Path(scenario_path).stem
    rows = []
    try:
        s = load_scenario(scenario_path, rho, F, hops)
        _, _, m = pipeline(s)
        n_cons = model_stats(m).num_constraints
    except Exception:  # recorded as error rows; the sweep goes on
        return [dict(scenario=name, rho=rho, F=F, num_constraints="", engine=e,
                     status="error", objective="", wall_time="") for e in engines]
    for engine in engines:
        try:
            res = solve_model(m, engine, time_limit, kind)
            status, obj, wall = str(res.status), res.objective, res.wall_time
        except Exception:
            status, obj, wall = "error", None, ""
        rows.append(dict(
            scenario=name, rho=rho, F=F, num_constraints=n_cons, engine=engine, status=status,
            objective="" if obj is None else f"{obj:g}",
            wall_time=wall if wall == "" else f"{wall:.3f}",
        ))
    return rows


def run_bench(scenarios, rhos, faults, engines, time_limit, hops=None, jobs=1, kind="pb"):
    """Rows for the (scenario, rho desc, F asc, engine) cross product."""
    tasks = [
        (str(sc), rho, F, hops, list(engines), time_limit, kind)
        for sc in scenarios
        for rho in sorted(rhos, reverse=True)
        for F in sorted(faults)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_bench_cell, tasks))
    else:
        results = [_bench_cell(t) for t in tasks]
    return [row for rows in results for row in rows]


def cmd_bench(args):
    engines = args.engine or ["internal"]
    rows = run_bench(
        args.scenarios,
        _floats(args.rho),
        _ints(args.fault_tolerance),
        engines,
        args.time_limit,
        hops=args.hops,
        jobs=args.jobs,
        kind=args.solver_kind,
    )
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=BENCH_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    finally:
        if args.output:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relayplace", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def overrides(p, multi=False):
        p.add_argument("--rho", type=str if multi else float, default=None)
        p.add_argument("--fault-tolerance", type=str if multi else int, default=None)
        p.add_argument("--hops", type=int, default=None)
        p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("synth", help="write a seeded synthetic scenario")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--size", choices=sorted(SIZE_CLASSES), default="tiny")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("build", help="candidate set, visibility graph and model statistics")
    p.add_argument("scenario")
    overrides(p, multi=True)
    p.add_argument("--graph-csv")
    p.add_argument("--candidates-csv")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("encode", help="write solver input files")
    p.add_argument("scenario")
    overrides(p)
    p.add_argument("--format", default="lp,opb,smt2")
    p.add_argument("--feasibility", action="store_true")
    p.add_argument("--budget", type=float)
    p.add_argument("-o", "--output", help="output stem")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("solve", help="solve a scenario or an .lp/.opb instance")
    p.add_argument("input")
    overrides(p)
    p.add_argument("--engine", default="internal", help="'internal' or a command with {instance}")
    p.add_argument("--solver-kind", choices=sorted(_KIND_FORMAT), default="pb")
    p.add_argument("--time-limit", type=float, default=60.0)
    p.add_argument("--assignment-out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check an assignment file against a scenario")
    p.add_argument("scenario")
    p.add_argument("assignment")
    overrides(p)
    p.add_argument("--csv", help="write violations as CSV")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="sweep rho x F x engines and emit CSV")
    p.add_argument("scenarios", nargs="+")
    p.add_argument("--rho", default="1,0.9,0.8,0.7,0.6,0.5,0.4")
    p.add_argument("--fault-tolerance", default="0,1")
    p.add_argument("--hops", type=int)
    p.add_argument("--engine", action="append")
    p.add_argument("--solver-kind", choices=sorted(_KIND_FORMAT), default="pb")
    p.add_argument("--time-limit", type=float, default=60.0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"relayplace: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
