"""Optimum-preserving reduction of a 0-1 model before enumeration.

Three rules run to a fixpoint:

* bound propagation -- a variable whose value would break a row is fixed;
* dual fixing -- a variable that only ever makes rows harder to satisfy and
  costs nothing negative is fixed to 0 (and symmetrically to 1);
* probing -- a value whose propagation ends in conflict is excluded.

Every feasible point of the reduced model, extended with the fixed values,
is feasible for the original; some original optimum survives the reduction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..model import EQ, GE, LE, LinearConstraint, Model01LP, VarRef
from .engine import FREE, Propagator
from .result import SolverResult, Status


@dataclass(frozen=True)
class Pruned:
    original: Model01LP
    model: Model01LP
    kept: tuple  # reduced column -> original column
    fixed: dict  # original column -> value
    offset: float  # cost of the fixed variables
    infeasible: bool = False

    def lift(self, reduced_values) -> list[int]:
        vals = [0] * self.original.num_vars
        for j, v in self.fixed.items():
            vals[j] = v
        for k, j in enumerate(self.kept):
            vals[j] = int(reduced_values[k])
        return vals

    def lift_result(self, res: SolverResult) -> SolverResult:
        if res.assignment is None:
            return res
        vals = self.lift(res.values(self.model.num_vars))
        obj = None if self.original.objective is None else self.original.objective_value(vals)
        return replace(res, objective=obj, assignment=dict(enumerate(vals)))


def _dual_fix(eng: Propagator) -> bool:
    """One dual-fixing sweep; returns (changed, ok)."""
    maxact = []
    for (terms, rhs), z in zip(eng.rows, eng.zact):
        maxact.append(z + sum(a for a, j in terms if a > 0 and eng.value[j] == FREE))
    changed = False
    for j in range(eng.n):
        if eng.value[j] != FREE:
            continue
        signs = {a > 0 for r, a in eng.var_rows[j] if maxact[r] > eng.rhs[r]}
        if signs <= {True} and eng.cost[j] >= 0:
            val = 0
        elif signs == {False} and eng.cost[j] <= 0:
            val = 1
        else:
            continue
        if not (eng.assign(j, val) and eng.propagate()):
            return changed, False
        changed = True
    return changed, True


def _probe(eng: Propagator):
    changed = False
    for j in range(eng.n):
        if eng.value[j] != FREE:
            continue
        for val in (1, 0):
            mark = len(eng.trail)
            ok = eng.assign(j, val) and eng.propagate()
            eng.undo_to(mark)
            if not ok:
                if not (eng.assign(j, 1 - val) and eng.propagate()):
                    return changed, False
                changed = True
                break
    return changed, True


def _infeasible(m: Model01LP) -> Pruned:
    con = LinearConstraint((), GE, 1, "infeasible")
    reduced = Model01LP(0, (), (con,), None if m.objective is None else ())
    return Pruned(m, reduced, (), {}, 0.0, True)


def prune(m: Model01LP, probe: bool = True) -> Pruned:
    eng = Propagator(m)
    if not eng.propagate():
        return _infeasible(m)
    changed = True
    while changed:
        changed, ok = _dual_fix(eng)
        if not ok:
            return _infeasible(m)
        if probe:
            probed, ok = _probe(eng)
            if not ok:
                return _infeasible(m)
            changed = changed or probed

    value = eng.value
    kept = tuple(j for j in range(m.num_vars) if value[j] == FREE)
    newcol = {j: k for k, j in enumerate(kept)}
    fixed = {j: value[j] for j in range(m.num_vars) if value[j] != FREE}

    cons = []
    for con in m.constraints:
        rhs = con.rhs
        terms = []
        for c, j in con.terms:
            if j in newcol:
                terms.append((c, newcol[j]))
            else:
                rhs -= c * fixed[j]
        lo = sum(c for c, _ in terms if c < 0)
        hi = sum(c for c, _ in terms if c > 0)
        if con.sense == LE and hi <= rhs:
            continue
        if con.sense == GE and lo >= rhs:
            continue
        if con.sense == EQ and not terms and rhs == 0:
            continue
        cons.append(LinearConstraint(tuple(terms), con.sense, rhs, con.family))

    offset = 0.0
    objective = None
    if m.objective is not None:
        objective = []
        for c, j in m.objective:
            if j in newcol:
                objective.append((c, newcol[j]))
            else:
                offset += c * fixed[j]
        objective = tuple(objective)
    table = tuple(
        VarRef(m.var_table[j].kind, m.var_table[j].indices, k) for k, j in enumerate(kept)
    )
    reduced = Model01LP(len(kept), table, tuple(cons), objective)
    return Pruned(m, reduced, kept, fixed, offset)


def solve_pruned(m: Model01LP, solver, **kwargs) -> SolverResult:
    """Prune ``m``, run ``solver`` on the remainder and lift the answer back."""
    pr = prune(m)
    if pr.infeasible:
        return SolverResult(Status.UNSATISFIABLE, solver_name=getattr(solver, "__name__", ""))
    return pr.lift_result(solver(pr.model, **kwargs))
