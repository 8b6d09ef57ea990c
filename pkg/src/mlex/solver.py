"""Incremental SAT session with activation-literal guarded trials.

Each trial's clauses carry an extra literal ``-g`` for a fresh guard ``g``.
Solving under the assumption ``g`` switches the trial on; asserting the unit
``g`` makes it permanent and asserting ``-g`` retires it for good.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from typing import Sequence

from pysat.solvers import Solver, SolverNames

from .cnf import Clause, PermVarMap, VarPool, build_bijection_constraints, write_dimacs
from .magma import Permutation

BACKENDS = {
    "minisat": "minisat22",
    "cadical": "cadical195",
    "glucose": "glucose4",
}
DEFAULT_BACKEND = "minisat"

# pysat cannot interrupt these; deadlines are then only checked between calls
_NO_INTERRUPT = ("cadical", "kissat", "lingeling")


class SolverTimeout(Exception):
    pass


def resolve_backend(name: str) -> str:
    pysat_name = BACKENDS.get(name, name)
    known = {alias for aliases in vars(SolverNames).values() if isinstance(aliases, tuple) for alias in aliases}
    if pysat_name not in known:
        raise ValueError(f"unknown solver backend {name!r}; try one of {sorted(BACKENDS)}")
    return pysat_name


@dataclass(frozen=True)
class TrialGuard:
    literal: int
    row: int
    col: int
    values: tuple[int, ...]


class SolverSession:
    """One incremental solver holding the bijection constraints for order ``n``."""

    def __init__(self, n: int, backend: str = DEFAULT_BACKEND, record: bool = False):
        self.vmap = PermVarMap(n)
        self.pool = VarPool(self.vmap.size)
        self.backend = resolve_backend(backend)
        self.solver = Solver(name=self.backend)
        self._interruptible = not self.backend.startswith(_NO_INTERRUPT)
        self.record = record
        self.permanent: list[Clause] = []
        self.last_trial: TrialGuard | None = None
        self._last_trial_clauses: list[Clause] = []
        self.calls = 0
        self.add_permanent(build_bijection_constraints(self.vmap, self.pool))

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self) -> None:
        if self.solver is not None:
            self.solver.delete()
            self.solver = None

    def add_permanent(self, clauses: Sequence[Clause]) -> None:
        self.solver.append_formula(clauses)
        if self.record:
            self.permanent.extend(list(cl) for cl in clauses)

    def add_permanent_unit(self, lit: int) -> None:
        self.add_permanent([[lit]])

    def new_trial(self, row: int, col: int, values: Sequence[int], clauses: Sequence[Clause]) -> TrialGuard:
        g = self.pool.fresh()
        guard = TrialGuard(g, row, col, tuple(values))
        guarded = [[*cl, -g] for cl in clauses]
        self.solver.append_formula(guarded)
        if self.record:
            self._last_trial_clauses = guarded
        return guard

    def assume_trial(self, guard: TrialGuard, deadline: float | None = None) -> Permutation | None:
        """Solve with the guard switched on; the model's permutation on SAT, ``None`` on UNSAT."""
        self.last_trial = guard
        if self.solve([guard.literal], deadline):
            return self.vmap.permutation(self.solver.get_model())
        return None

    def commit_trial(self, guard: TrialGuard) -> None:
        self.add_permanent_unit(guard.literal)

    def retire_trial(self, guard: TrialGuard) -> None:
        self.add_permanent_unit(-guard.literal)

    def solve(self, assumptions: Sequence[int] = (), deadline: float | None = None) -> bool:
        self.calls += 1
        if deadline is None:
            return self.solver.solve(assumptions=assumptions)
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise SolverTimeout
        if not self._interruptible:
            return self.solver.solve(assumptions=assumptions)
        timer = threading.Timer(remaining, self.solver.interrupt)
        timer.start()
        try:
            result = self.solver.solve_limited(assumptions=assumptions, expect_interrupt=True)
        finally:
            timer.cancel()
            self.solver.clear_interrupt()
        if result is None:
            raise SolverTimeout
        return result

    def model_permutation(self) -> Permutation:
        return self.vmap.permutation(self.solver.get_model())

    def dump_dimacs(self, path) -> None:
        """Write the permanent clauses plus the most recent trial, switched on by a unit."""
        if not self.record:
            raise RuntimeError("session was created without clause recording")
        guard = self.last_trial
        retired = [-guard.literal] if guard is not None else None
        clauses = [cl for cl in self.permanent if cl != retired]
        comments = [f"mlex permutation variables x(i,j) = i*{self.vmap.order}+j+1 (0-based i, j)"]
        if guard is not None:
            clauses += self._last_trial_clauses + [[guard.literal]]
            comments.append(
                f"trial: cell ({guard.row + 1},{guard.col + 1}) in {{{','.join(str(v + 1) for v in guard.values)}}}"
            )
        write_dimacs(path, clauses, comments)
