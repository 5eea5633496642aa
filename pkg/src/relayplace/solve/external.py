"""Running third-party solvers as subprocesses and reading their answers.

Three output dialects are understood:

``pb``
    pseudo-Boolean competition output: ``s <STATUS>``, ``o <value>``,
    ``v x1 -x2 ...`` literal lines.
``omt``
    SMT-LIB2 solver output: ``sat``/``unsat``/``unknown``, an optional
    ``(objectives ...)`` block and ``(define-fun <name> () Int <0|1>)`` model
    entries.
``milp-lp``
    the normalized adapter protocol for MILP solvers, one item per line::

        STATUS optimal|satisfiable|unsatisfiable|timeout
        OBJ <real>
        VAR <name> <0|1>
"""

from __future__ import annotations

import os
import re
import shlex
import signal
import subprocess
import time
from fractions import Fraction
from typing import Optional

from .result import SolverResult, Status

KINDS = ("milp-lp", "pb", "omt")

_PB_STATUS = {
    "OPTIMUM FOUND": Status.OPTIMAL,
    "SATISFIABLE": Status.SATISFIABLE,
    "UNSATISFIABLE": Status.UNSATISFIABLE,
    "UNKNOWN": Status.TIMEOUT,
}
_MILP_STATUS = {s.value: s for s in (Status.OPTIMAL, Status.SATISFIABLE, Status.UNSATISFIABLE, Status.TIMEOUT)}


class SolverOutputError(ValueError):
    pass


def _parse_pb(stdout: str, scale: float):
    status, obj, assignment = None, None, {}
    for line in stdout.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip()
            if word not in _PB_STATUS:
                raise SolverOutputError(f"unrecognized status line {line!r}")
            status = _PB_STATUS[word]
        elif line.startswith("o "):
            try:
                obj = int(line.split()[1]) / scale
            except (IndexError, ValueError):
                raise SolverOutputError(f"bad objective line {line!r}") from None
        elif line.startswith("v "):
            for lit in line.split()[1:]:
                neg = lit.startswith("-") or lit.startswith("~")
                name = lit.lstrip("-~")
                if not re.fullmatch(r"x[1-9]\d*", name):
                    raise SolverOutputError(f"bad literal {lit!r}")
                assignment[int(name[1:]) - 1] = 0 if neg else 1
    if status is None:
        raise SolverOutputError("no status line")
    return status, obj, assignment or None


def _sexprs(text: str):
    """Tokenize into nested lists of atoms."""
    tokens = re.findall(r"\(|\)|\"[^\"]*\"|\|[^|]*\||[^\s()]+", text)
    stack = [[]]
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise SolverOutputError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise SolverOutputError("unbalanced '('")
    return stack[0]


def _smt_value(v) -> Fraction:
    if isinstance(v, str):
        return Fraction(v)
    if len(v) == 2 and v[0] == "-":
        return -_smt_value(v[1])
    if len(v) == 3 and v[0] == "/":
        return _smt_value(v[1]) / _smt_value(v[2])
    raise SolverOutputError(f"cannot read value {v!r}")


def _parse_omt(stdout: str, varmap: Optional[dict], scale: float):
    status = None
    for line in stdout.splitlines():
        word = line.strip()
        if word in ("sat", "unsat", "unknown", "timeout"):
            status = word
            break
    if status is None:
        raise SolverOutputError("no sat/unsat line")
    if status == "unsat":
        return Status.UNSATISFIABLE, None, None
    if status in ("unknown", "timeout"):
        return Status.TIMEOUT, None, None

    obj = None
    assignment = {}
    for item in _sexprs(stdout):
        if not isinstance(item, list) or not item:
            continue
        if item[0] == "objectives":
            entries = [e for e in item[1:] if isinstance(e, list) and len(e) >= 2]
            if entries:
                obj = float(_smt_value(entries[0][-1])) / scale
        elif item[0] == "model" or all(isinstance(e, list) for e in item):
            for d in item:
                if isinstance(d, list) and len(d) == 5 and d[0] == "define-fun":
                    name, val = d[1], d[4]
                    if varmap is not None:
                        if name not in varmap:
                            raise SolverOutputError(f"unknown variable {name!r}")
                        assignment[varmap[name]] = int(_smt_value(val))
    status = Status.OPTIMAL if obj is not None else Status.SATISFIABLE
    return status, obj, assignment or None


def _parse_milp(stdout: str, varmap: Optional[dict], scale: float):
    status, obj, assignment = None, None, {}
    for line in stdout.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "STATUS" and len(parts) == 2:
            if parts[1] not in _MILP_STATUS:
                raise SolverOutputError(f"unrecognized status {parts[1]!r}")
            status = _MILP_STATUS[parts[1]]
        elif parts[0] == "OBJ" and len(parts) == 2:
            obj = float(parts[1]) / scale
        elif parts[0] == "VAR" and len(parts) == 3:
            name, val = parts[1], parts[2]
            if val not in ("0", "1"):
                raise SolverOutputError(f"non-binary value in {line!r}")
            if varmap is None or name not in varmap:
                raise SolverOutputError(f"unknown variable {name!r}")
            assignment[varmap[name]] = int(val)
    if status is None:
        raise SolverOutputError("no STATUS line")
    return status, obj, assignment or None


def parse_solver_output(kind: str, stdout: str, varmap: Optional[dict] = None,
                        objective_scale: float = 1.0) -> SolverResult:
    """Turn raw solver output into a :class:`SolverResult`.

    ``varmap`` maps variable names to columns (needed for ``omt`` and
    ``milp-lp``). Reported objectives are divided by ``objective_scale``.
    Unreadable output yields status ``error`` with the text attached.
    """
    if kind not in KINDS:
        raise ValueError(f"unsupported solver kind {kind!r}")
    try:
        if kind == "pb":
            status, obj, assignment = _parse_pb(stdout, objective_scale)
        elif kind == "omt":
            status, obj, assignment = _parse_omt(stdout, varmap, objective_scale)
        else:
            status, obj, assignment = _parse_milp(stdout, varmap, objective_scale)
    except (SolverOutputError, ValueError, ZeroDivisionError) as exc:
        return SolverResult(Status.ERROR, output=f"{exc}\n{stdout}")
    if status == Status.UNSATISFIABLE:
        obj, assignment = None, None
    return SolverResult(status, obj, assignment, output=stdout)


def _kill_group(proc: subprocess.Popen):
    for sig in (signal.SIGTERM, signal.SIGKILL):
        try:
            os.killpg(proc.pid, sig)
        except ProcessLookupError:
            return
        try:
            proc.wait(timeout=1.0)
            return
        except subprocess.TimeoutExpired:
            continue


def run_external(cmd_template: str, instance_path, time_limit: float, kind: str = "pb",
                 varmap: Optional[dict] = None, objective_scale: float = 1.0,
                 solver_name: Optional[str] = None) -> SolverResult:
    """Run ``cmd_template`` with ``{instance}`` substituted, under a wall-clock limit.

    The solver runs in its own process group, which is terminated (then
    killed) when the limit expires.
    """
    if "{instance}" not in cmd_template:
        raise ValueError("command template needs an {instance} placeholder")
    argv = [tok.replace("{instance}", str(instance_path)) for tok in shlex.split(cmd_template)]
    name = solver_name or os.path.basename(argv[0])
    start = time.perf_counter()
    try:
        proc = subprocess.Popen(
            argv, stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True, start_new_session=True
        )
    except OSError as exc:
        return SolverResult(Status.ERROR, wall_time=time.perf_counter() - start,
                            solver_name=name, output=f"spawn failed: {exc}")
    try:
        stdout, stderr = proc.communicate(timeout=time_limit)
        timed_out = False
    except subprocess.TimeoutExpired:
        _kill_group(proc)
        try:
            stdout, stderr = proc.communicate(timeout=2.0)
        except subprocess.TimeoutExpired:
            stdout, stderr = "", ""
        timed_out = True
    elapsed = time.perf_counter() - start

    if timed_out:
        res = SolverResult(Status.TIMEOUT, output=(stdout or "") + (stderr or ""))
        partial = parse_solver_output(kind, stdout or "", varmap, objective_scale)
        if partial.status != Status.ERROR and partial.assignment is not None:
            res.objective, res.assignment = partial.objective, partial.assignment
    else:
        res = parse_solver_output(kind, stdout, varmap, objective_scale)
        if stderr:
            res.output = (res.output + "\n" + stderr).strip()
    res.wall_time = elapsed
    res.solver_name = name
    return res
