"""Exhaustive enumeration oracle for very small 0-1 models."""

from __future__ import annotations

import time

import numpy as np

from ..model import Model01LP
from .engine import normalized_rows
from .result import SolverResult, Status

MAX_VARS = 26
_CHUNK_BITS = 16
_TOL = 1e-9


def _dense(m: Model01LP):
    rows = normalized_rows(m)
    A = np.zeros((len(rows), m.num_vars))
    b = np.zeros(len(rows))
    for r, (terms, rhs) in enumerate(rows):
        for a, j in terms:
            A[r, j] += a
        b[r] = rhs
    c = np.zeros(m.num_vars)
    for coef, j in m.objective or ():
        c[j] += coef
    return A, b, c


def brute_force(m: Model01LP, max_vars: int = MAX_VARS) -> SolverResult:
    """Try all 2^n assignments in lexicographic order (column 0 most significant).

    Returns the first assignment attaining the minimum cost, i.e. the
    lexicographically smallest optimum; feasibility models stop at the
    first feasible point.
    """
    n = m.num_vars
    if n > max_vars:
        raise ValueError(f"brute_force is capped at {max_vars} variables, model has {n}")
    start = time.perf_counter()
    A, b, c = _dense(m)
    # split the columns: the low bits are enumerated once as a table, the high
    # bits walk in order and only shift each row's slack
    low = min(n, _CHUNK_BITS)
    high = n - low
    ks = np.arange(1 << low, dtype=np.int64)
    X_low = ((ks[:, None] >> np.arange(low - 1, -1, -1)[None, :]) & 1).astype(float)
    act_low = X_low @ A[:, high:].T  # (2^low, rows)
    cost_low = X_low @ c[high:]
    best_k, best_cost = None, np.inf
    for h in range(1 << high):
        x_high = np.array([(h >> (high - 1 - j)) & 1 for j in range(high)], dtype=float)
        slack = b + _TOL - A[:, :high] @ x_high
        idx = ks
        for r in range(len(b)):
            idx = idx[act_low[idx, r] <= slack[r]]
            if not len(idx):
                break
        if not len(idx):
            continue
        if m.objective is None:
            best_k = (h << low) | int(idx[0])
            break
        cost = cost_low[idx] + c[:high] @ x_high
        i = int(np.argmax(cost <= cost.min() + _TOL))
        if cost[i] < best_cost - _TOL:
            best_cost, best_k = float(cost[i]), (h << low) | int(idx[i])

    elapsed = time.perf_counter() - start
    if best_k is None:
        return SolverResult(Status.UNSATISFIABLE, wall_time=elapsed, solver_name="internal-brute")
    vals = [(best_k >> (n - 1 - j)) & 1 for j in range(n)]
    if m.objective is None:
        return SolverResult(Status.SATISFIABLE, None, dict(enumerate(vals)), elapsed, "internal-brute")
    return SolverResult(
        Status.OPTIMAL, m.objective_value(vals), dict(enumerate(vals)), elapsed, "internal-brute"
    )
