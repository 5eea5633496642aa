"""Bound propagation over 0-1 rows in ``sum(a_j x_j) <= b`` form.

Shared by the branch-and-bound search and the presolve pruning.
"""

from __future__ import annotations

from ..model import EQ, GE, LE, Model01LP

FREE = -1


def normalized_rows(m: Model01LP):
    """Each constraint as one or two ``(terms, rhs)`` rows meaning ``<=``."""
    rows = []
    for con in m.constraints:
        terms = tuple((int(c), j) for c, j in con.terms)
        neg = tuple((-c, j) for c, j in terms)
        if con.sense == LE:
            rows.append((terms, con.rhs))
        elif con.sense == GE:
            rows.append((neg, -con.rhs))
        elif con.sense == EQ:
            rows.append((terms, con.rhs))
            rows.append((neg, -con.rhs))
        else:
            raise ValueError(f"unknown sense {con.sense!r}")
    return rows


class Propagator:
    """Incremental min-activity bookkeeping with a trail for undo.

    ``minact[r]`` is the smallest activity row ``r`` can still reach;
    ``zact[r]`` is its activity when every free variable is set to 0.
    """

    def __init__(self, m: Model01LP):
        self.n = m.num_vars
        self.rows = normalized_rows(m)
        self.rhs = [b for _, b in self.rows]
        self.var_rows = [[] for _ in range(self.n)]
        self.minact = []
        self.zact = [0] * len(self.rows)
        for r, (terms, _) in enumerate(self.rows):
            self.minact.append(sum(a for a, _ in terms if a < 0))
            for a, j in terms:
                self.var_rows[j].append((r, a))
        self.value = [FREE] * self.n
        self.trail: list[int] = []
        self.violated = {r for r in range(len(self.rows)) if self.zact[r] > self.rhs[r]}
        self.cost = [0.0] * self.n
        for c, j in m.objective or ():
            self.cost[j] += c
        self.fixed_cost = 0.0
        self._queue: list[int] = list(range(len(self.rows)))

    def assign(self, j: int, val: int) -> bool:
        """Fix ``x_j = val``; False on an immediately violated row."""
        if self.value[j] != FREE:
            return self.value[j] == val
        self.value[j] = val
        self.trail.append(j)
        if val:
            self.fixed_cost += self.cost[j]
        ok = True
        minact, zact, rhs, violated = self.minact, self.zact, self.rhs, self.violated
        for r, a in self.var_rows[j]:
            delta = a * val - (a if a < 0 else 0)
            if delta:
                minact[r] += delta
                if delta > 0:
                    self._queue.append(r)
                    if minact[r] > rhs[r]:
                        ok = False
            if val:
                zact[r] += a
                if zact[r] > rhs[r]:
                    violated.add(r)
                else:
                    violated.discard(r)
        return ok

    def _unassign(self, j: int):
        val = self.value[j]
        self.value[j] = FREE
        if val:
            self.fixed_cost -= self.cost[j]
        for r, a in self.var_rows[j]:
            self.minact[r] -= a * val - (a if a < 0 else 0)
            if val:
                self.zact[r] -= a
                if self.zact[r] > self.rhs[r]:
                    self.violated.add(r)
                else:
                    self.violated.discard(r)

    def undo_to(self, mark: int):
        while len(self.trail) > mark:
            self._unassign(self.trail.pop())
        self._queue.clear()

    def propagate(self) -> bool:
        """Fix every variable forced by a row's slack; False on conflict."""
        queue = self._queue
        value, rows, minact, rhs = self.value, self.rows, self.minact, self.rhs
        while queue:
            r = queue.pop()
            slack = rhs[r] - minact[r]
            if slack < 0:
                queue.clear()
                return False
            for a, j in rows[r][0]:
                if value[j] != FREE:
                    continue
                if a > slack:
                    if not self.assign(j, 0):
                        queue.clear()
                        return False
                elif -a > slack:
                    if not self.assign(j, 1):
                        queue.clear()
                        return False
                slack = rhs[r] - minact[r]
                if slack < 0:
                    queue.clear()
                    return False
        return True

    def branch_variable(self):
        """Lowest free column in a row the all-zero completion violates.

        None means fixing every free variable to 0 satisfies all rows.
        """
        best = None
        value = self.value
        for r in self.violated:
            for _, j in self.rows[r][0]:
                if value[j] == FREE:
                    if best is None or j < best:
                        best = j
                    break
        return best

    def completion(self) -> list[int]:
        return [v if v != FREE else 0 for v in self.value]
