"""Cell-by-cell construction of the lexicographically smallest isomorphic copy.

The copy is filled in row-major order. For each cell the least value that
still admits a permutation consistent with every committed cell is found with
SAT queries over the permutation variables, then committed permanently.
Counting arguments (budgets), the first-row candidates, row invariants and the
best complete copy seen so far are used to skip or narrow those queries.
"""

from __future__ import annotations

import time
from collections import Counter, defaultdict
from dataclasses import dataclass, fields
from enum import Enum
from typing import NamedTuple

import numpy as np

from .budget import BudgetState, Preimages
from .cnf import encode_assignment, encode_value_set
from .magma import (
    Magma,
    Permutation,
    apply_permutation,
    first_row_candidates,
    invariant_of_row,
    row_invariants,
)
from .solver import DEFAULT_BACKEND, SolverSession, SolverTimeout

DEFAULT_TIMEOUT = 1800.0


class Strategy(str, Enum):
    LINEAR = "lus"
    BINARY = "bin2"


TOGGLES = ("first_row", "budgets", "row_invariants", "midrow", "witness")


@dataclass(frozen=True)
class EngineConfig:
    strategy: Strategy = Strategy.BINARY
    first_row: bool = True
    budgets: bool = True
    row_invariants: bool = True
    midrow: bool = True
    witness: bool = True
    solver: str = DEFAULT_BACKEND
    timeout: float | None = DEFAULT_TIMEOUT

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))

    @property
    def bitmask(self) -> int:
        """Bit ``i`` is set when ``TOGGLES[i]`` is on."""
        return sum(1 << i for i, name in enumerate(TOGGLES) if getattr(self, name))

    @classmethod
    def from_bitmask(cls, mask: int, **kw) -> EngineConfig:
        """Toggles from ``mask``; keyword arguments win over mask bits."""
        return cls(**{**{name: bool(mask >> i & 1) for i, name in enumerate(TOGGLES)}, **kw})


@dataclass
class RunStats:
    """Counters for one run.

    ``budget_skips`` counts values below the committed one that were never
    queried because their budget was exhausted. ``witness_skips`` counts cells
    committed to the witness value without a query confirming it.
    """

    sat_calls: int = 0
    unsat_calls: int = 0
    budget_skips: int = 0
    witness_skips: int = 0
    invariant_row_fixes: int = 0
    invariant_exclusions: int = 0
    wall_ms: float = 0.0

    @property
    def solver_calls(self) -> int:
        return self.sat_calls + self.unsat_calls

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


class CanonResult(NamedTuple):
    lexmin: Magma
    witness: Permutation
    stats: RunStats


class EngineError(RuntimeError):
    pass


class CanonizeTimeout(Exception):
    """Raised when the wall-clock budget runs out; carries the committed prefix (0-based, row-major)."""

    def __init__(self, prefix: list[int], stats: RunStats, order: int):
        self.prefix = prefix
        self.stats = stats
        self.order = order
        super().__init__(f"timed out after {len(prefix)} of {order * order} cells")


class LexminEngine:
    def __init__(self, m: Magma, cfg: EngineConfig = EngineConfig(), record_cnf: bool = False):
        self.m = m
        self.n = m.order
        self.cfg = cfg
        self.session = SolverSession(self.n, cfg.solver, record=record_cnf)
        self.vmap = self.session.vmap
        self.pre = Preimages(self.n)
        self.budgets = BudgetState(m, self.pre) if cfg.budgets else None
        self.rows: list[list[int]] = []
        self.prefix: list[int] = []
        self.witness: tuple[tuple[tuple[int, ...], ...], Permutation] | None = None
        self.stats = RunStats()
        self.deadline: float | None = None
        self._invariant_rows: dict = defaultdict(list)
        for a, inv in enumerate(row_invariants(m)):
            self._invariant_rows[inv].append(a)
        self._invariants_seen: Counter = Counter()
        self._idempotent = np.array([m.table[a][a] == a for a in range(self.n)])
        self._exhausted: set = set()

    def close(self) -> None:
        self.session.close()

    # main loop

    def run(self) -> CanonResult:
        t0 = time.perf_counter()
        if self.cfg.timeout is not None:
            self.deadline = time.monotonic() + self.cfg.timeout
        try:
            if self.cfg.first_row:
                self.apply_first_row_restriction()
            if self.cfg.witness:
                self._seed_witness()
            for r in range(self.n):
                self.rows.append([])
                for c in range(self.n):
                    if self.deadline is not None and time.monotonic() > self.deadline:
                        raise SolverTimeout
                    if self.cfg.strategy is Strategy.LINEAR:
                        v = self.next_value_linear(r, c)
                    else:
                        v = self.next_value_binary(r, c)
                    self._record(r, c, v)
                if self.cfg.row_invariants:
                    self.on_row_complete(r)
        except SolverTimeout:
            self.stats.wall_ms = (time.perf_counter() - t0) * 1000
            raise CanonizeTimeout(list(self.prefix), self.stats, self.n) from None
        self.stats.wall_ms = (time.perf_counter() - t0) * 1000
        lexmin = Magma(tuple(tuple(row) for row in self.rows))
        table, f = self.witness
        if table != lexmin.table:
            raise EngineError("final witness does not reproduce the constructed table")
        return CanonResult(lexmin, f, self.stats)

    def _record(self, r: int, c: int, v: int) -> None:
        self.rows[r].append(v)
        self.prefix.append(v)
        if self.witness is None or self.witness[0][r][c] != v:
            raise EngineError(f"witness disagrees with committed cell ({r + 1},{c + 1})")
        if self.budgets is not None:
            self.budgets.place(r, c, v)
        if c == r and self.cfg.midrow:
            self.refine_midrow(r, v)

    # propagators

    def apply_first_row_restriction(self) -> None:
        cands = first_row_candidates(self.m)
        if cands is None:
            return
        for a in range(self.n):
            if a not in cands:
                self.session.add_permanent_unit(-self.vmap(a, 0))
        self.pre.restrict(0, [a in cands for a in range(self.n)])

    def refine_midrow(self, r: int, diagonal_value: int) -> None:
        """Once ``r <> r`` is known, ``r`` is the image of an idempotent iff ``r <> r = r``."""
        idem = self._idempotent
        self.pre.restrict(r, idem if diagonal_value == r else ~idem)

    def budget_allows(self, r: int, c: int, v: int) -> bool:
        return self.budgets is None or self.budgets.allows(r, c, v)

    def on_row_complete(self, r: int) -> None:
        inv = invariant_of_row(self.rows[r], r)
        sources = self._invariant_rows.get(inv)
        if not sources:
            raise EngineError(f"row {r + 1} of the copy matches no input row")
        self._invariants_seen[inv] += 1
        mask = np.zeros(self.n, dtype=bool)
        mask[sources] = True
        was_fixed = self.pre.fixed(r)
        cands = [a for a in sources if self.pre.allowed[r, a]]
        if len(cands) == 1 and was_fixed is None:
            self.session.add_permanent_unit(self.vmap(cands[0], r))
            self.stats.invariant_row_fixes += 1
        self.pre.restrict(r, mask)
        if self._invariants_seen[inv] == len(sources) and inv not in self._exhausted:
            self._exhausted.add(inv)
            for a in sources:
                for later in range(r + 1, self.n):
                    if self.pre.allowed[later, a]:
                        self.session.add_permanent_unit(-self.vmap(a, later))
                        self.pre.forbid(later, a)
                        self.stats.invariant_exclusions += 1

    def _seed_witness(self) -> None:
        f = Permutation.identity(self.n)
        first = self.pre.allowed[0]
        if not first[0]:
            f = Permutation.transposition(self.n, 0, int(np.flatnonzero(first)[0]))
        self._offer(f)

    def _offer(self, f: Permutation) -> None:
        """Keep the lexicographically smaller of the stored witness and the copy under ``f``."""
        table = apply_permutation(self.m, f).table
        if self.witness is None or table < self.witness[0]:
            self.witness = (table, f)

    # queries

    def _query(self, r: int, c: int, values: list[int]) -> Permutation | None:
        clauses = encode_value_set(self.vmap, self.m, r, c, values)
        guard = self.session.new_trial(r, c, values, clauses)
        f = self.session.assume_trial(guard, self.deadline)
        if f is None:
            self.stats.unsat_calls += 1
            self.session.retire_trial(guard)
            return None
        self.stats.sat_calls += 1
        self._offer(f)
        if len(values) == 1:
            self.session.commit_trial(guard)
        else:
            self.session.retire_trial(guard)
        return f

    def _commit_known(self, r: int, c: int, v: int) -> None:
        """Commit a value already shown feasible by some model, without a fresh query."""
        self.session.add_permanent(encode_assignment(self.vmap, self.m, r, c, v))

    def _bound(self, r: int, c: int) -> int | None:
        if self.cfg.witness and self.witness is not None:
            return self.witness[0][r][c]
        return None

    def _candidates(self, r: int, c: int, hi: int | None) -> tuple[list[int], list[int]]:
        """Split ``0..hi-1`` into budget-feasible candidates and budget-skipped values."""
        top = self.n if hi is None else hi
        cands, skipped = [], []
        for v in range(top):
            (cands if self.budget_allows(r, c, v) else skipped).append(v)
        if hi is not None and not self.budget_allows(r, c, hi):
            raise EngineError(f"witness value {hi + 1} at ({r + 1},{c + 1}) violates a budget")
        return cands, skipped

    def _finish(self, v: int, skipped: list[int]) -> int:
        self.stats.budget_skips += sum(1 for s in skipped if s < v)
        return v

    def next_value_linear(self, r: int, c: int) -> int:
        """Try candidates in ascending order; the first satisfiable one is the answer."""
        hi = self._bound(r, c)
        cands, skipped = self._candidates(r, c, hi)
        for v in cands:
            if self._query(r, c, [v]) is not None:
                return self._finish(v, skipped)
        if hi is None:
            raise EngineError(f"no value admits a model at ({r + 1},{c + 1})")
        self.stats.witness_skips += 1
        self._commit_known(r, c, hi)
        return self._finish(hi, skipped)

    def next_value_binary(self, r: int, c: int) -> int:
        """Probe the least candidate, then halve the rest with value-set queries.

        ``best`` is the least value known to be feasible (from the witness or a
        model); candidates are kept strictly below it.
        """
        bound = self._bound(r, c)
        cands, skipped = self._candidates(r, c, bound)
        best = bound
        from_model = False
        while cands:
            lo = cands[0]
            if self._query(r, c, [lo]) is not None:
                return self._finish(lo, skipped)
            cands = cands[1:]
            if not cands:
                break
            half = cands[: (len(cands) + 1) // 2]
            f = self._query(r, c, half)
            if f is None:
                cands = cands[len(half):]
            else:
                best = f(self.m.table[f.inverse(r)][f.inverse(c)])
                from_model = True
                cands = [v for v in cands if v < best]
        if best is None:
            raise EngineError(f"no value admits a model at ({r + 1},{c + 1})")
        if not from_model:
            self.stats.witness_skips += 1
        self._commit_known(r, c, best)
        return self._finish(best, skipped)


def canonize(m: Magma, cfg: EngineConfig = EngineConfig(), dump_cnf=None) -> CanonResult:
    """Lexmin copy of ``m``, a permutation producing it, and run statistics.

    ``dump_cnf`` names a file receiving the final clause set plus the last trial
    in DIMACS form.
    """
    engine = LexminEngine(m, cfg, record_cnf=dump_cnf is not None)
    try:
        return engine.run()
    finally:
        if dump_cnf is not None:
            engine.session.dump_dimacs(dump_cnf)
        engine.close()
