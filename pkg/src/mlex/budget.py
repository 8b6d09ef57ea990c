"""Counting-based pruning: which input elements may still map to each copy element,
and how often each value may still be placed per row, column and table.
"""

from __future__ import annotations

import numpy as np

from .magma import Magma, occurrence_tables

# test hook: a deliberately unsound build for the oracle-check canary
FAULTS: set[str] = set()


class Preimages:
    """``allowed[j, a]`` is False once ``f(a) = j`` has been ruled out for the permutations still in play.

    Singletons are propagated both ways: a copy element with one candidate
    preimage claims it, and an input element allowed for a single copy
    element is pinned there.
    """

    def __init__(self, n: int):
        self.n = n
        self.allowed = np.ones((n, n), dtype=bool)
        self.version = 0

    def restrict(self, j: int, mask) -> None:
        mask = np.asarray(mask, dtype=bool)
        new = self.allowed[j] & mask
        if not new.any():
            raise ValueError(f"no preimage left for element {j}")
        if (new != self.allowed[j]).any():
            self.allowed[j] = new
            self._propagate()

    def forbid(self, j: int, a: int) -> None:
        mask = np.ones(self.n, dtype=bool)
        mask[a] = False
        self.restrict(j, mask)

    def fix(self, j: int, a: int) -> None:
        mask = np.zeros(self.n, dtype=bool)
        mask[a] = True
        self.restrict(j, mask)

    def fixed(self, j: int) -> int | None:
        cands = np.flatnonzero(self.allowed[j])
        return int(cands[0]) if len(cands) == 1 else None

    def _propagate(self) -> None:
        self.version += 1
        a = self.allowed
        changed = True
        while changed:
            changed = False
            row_single = a.sum(axis=1) == 1
            for j in np.flatnonzero(row_single):
                col = int(np.flatnonzero(a[j])[0])
                others = a[:, col].copy()
                others[j] = False
                if others.any():
                    a[others, col] = False
                    changed = True
            col_single = a.sum(axis=0) == 1
            for col in np.flatnonzero(col_single):
                j = int(np.flatnonzero(a[:, col])[0])
                if a[j].sum() > 1:
                    a[j] = False
                    a[j, col] = True
                    changed = True
        if not (a.any(axis=1).all() and a.any(axis=0).all()):
            raise ValueError("preimage constraints became contradictory")


class BudgetState:
    """Occurrence budgets for the copy under construction.

    The copy's row ``r`` is the image of some input row ``x`` with ``x`` allowed
    for ``r``, and value ``v`` is the image of some input element ``a`` allowed
    for ``v``; so ``v`` can appear in row ``r`` at most ``max o(x, a)`` times.
    Columns and the whole table are bounded the same way.
    """

    def __init__(self, m: Magma, pre: Preimages):
        self.n = m.order
        self.pre = pre
        self.row_counts, self.col_counts, self.totals = occurrence_tables(m)
        n = self.n
        self.placed_row = np.zeros((n, n), dtype=np.int32)
        self.placed_col = np.zeros((n, n), dtype=np.int32)
        self.placed_total = np.zeros(n, dtype=np.int32)
        self._cache: dict = {}
        self._cache_version = -1

    def _limits(self, r: int, c: int, v: int) -> tuple[int, int, int]:
        if self._cache_version != self.pre.version:
            self._cache.clear()
            self._cache_version = self.pre.version
        allowed = self.pre.allowed
        key_r, key_c, key_v = ("row", r, v), ("col", c, v), ("tab", v)
        cache = self._cache
        if key_v not in cache:
            cache[key_v] = int(self.totals[allowed[v]].max())
        if key_r not in cache:
            cache[key_r] = int(self.row_counts[np.ix_(allowed[r], allowed[v])].max())
        if key_c not in cache:
            cache[key_c] = int(self.col_counts[np.ix_(allowed[c], allowed[v])].max())
        return cache[key_r], cache[key_c], cache[key_v]

    def remaining(self, r: int, c: int, v: int) -> tuple[int, int, int]:
        row, col, tab = self._limits(r, c, v)
        return (
            row - int(self.placed_row[r, v]),
            col - int(self.placed_col[c, v]),
            tab - int(self.placed_total[v]),
        )

    def allows(self, r: int, c: int, v: int) -> bool:
        return min(self.remaining(r, c, v)) > 0

    def place(self, r: int, c: int, v: int) -> None:
        step = 2 if "double-budget-decrement" in FAULTS else 1
        self.placed_row[r, v] += step
        self.placed_col[c, v] += step
        self.placed_total[v] += step
