from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum

from .graph import OctSolution


class Termination(str, Enum):
    COMPLETED = "completed"
    DEADLINE = "deadline"
    REFUSED = "refused"
    ERROR = "error"


@dataclass(frozen=True)
class SolverReport:
    """Outcome of one OCT solver run.

    ``lower``/``upper`` bracket the optimum; ``optimal`` implies both equal
    the solution size. ``iterations`` counts solver-specific work units, so a
    run can be replayed without a clock.
    """

    solution: OctSolution
    lower: int
    upper: int
    optimal: bool
    elapsed: float
    seed: int | None
    termination: Termination
    iterations: int

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper {self.upper}")
        if self.optimal and not (self.lower == self.upper == self.solution.size):
            raise ValueError("optimal report must have lower == upper == |S|")

    @property
    def size(self) -> int:
        return self.solution.size


class Deadline:
    """Wall-clock deadline; ``None`` seconds means no limit."""

    def __init__(self, seconds: float | None):
        self.start = time.perf_counter()
        self.end = None if seconds is None else self.start + seconds

    def expired(self) -> bool:
        return self.end is not None and time.perf_counter() >= self.end

    def elapsed(self) -> float:
        return time.perf_counter() - self.start
