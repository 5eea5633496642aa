from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class Status(str, Enum):
    OPTIMAL = "optimal"
    SATISFIABLE = "satisfiable"
    UNSATISFIABLE = "unsatisfiable"
    TIMEOUT = "timeout"
    ERROR = "error"

    def __str__(self):
        return self.value


@dataclass
class SolverResult:
    status: Status
    objective: Optional[float] = None
    assignment: Optional[dict] = None  # column -> 0/1
    wall_time: float = 0.0
    solver_name: str = ""
    output: str = field(default="", repr=False)

    @property
    def has_solution(self) -> bool:
        return self.assignment is not None

    def values(self, num_vars: int) -> list[int]:
        """Dense 0/1 vector; unassigned columns read as 0."""
        vals = [0] * num_vars
        for j, v in (self.assignment or {}).items():
            vals[j] = int(v)
        return vals
