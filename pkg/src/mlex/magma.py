"""Finite magmas as multiplication tables, and isomorphism-invariant statistics.

Elements are 0-based internally (``0..n-1``); text I/O in :mod:`mlex.textio`
translates to the conventional 1-based tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Sequence

import numpy as np

MAX_ORDER = 1024


class OrderMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Magma:
    """An ``n x n`` multiplication table; ``table[r][c]`` is ``r * c``."""

    table: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.table)
        if n < 1:
            raise ValueError("magma order must be at least 1")
        if n > MAX_ORDER:
            raise ValueError(f"order {n} exceeds supported maximum {MAX_ORDER}")
        for r, row in enumerate(self.table):
            if len(row) != n:
                raise ValueError(f"row {r + 1} has {len(row)} entries, expected {n}")
            for c, v in enumerate(row):
                if not 0 <= v < n:
                    raise ValueError(f"entry ({r + 1},{c + 1}) = {v + 1} outside 1..{n}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], one_based: bool = False) -> Magma:
        shift = 1 if one_based else 0
        return cls(tuple(tuple(int(v) - shift for v in row) for row in rows))

    @property
    def order(self) -> int:
        return len(self.table)

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self.table[r][c]

    def rows(self, one_based: bool = False) -> list[list[int]]:
        shift = 1 if one_based else 0
        return [[v + shift for v in row] for row in self.table]

    def flat(self) -> tuple[int, ...]:
        return tuple(v for row in self.table for v in row)

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.table, dtype=np.int32)
        a.setflags(write=False)
        return a

    def __repr__(self) -> str:
        return f"Magma({self.rows(one_based=True)})"


@dataclass(frozen=True)
class Permutation:
    """A bijection on ``0..n-1``; ``image[i]`` is ``f(i)``."""

    image: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.image) != list(range(len(self.image))):
            raise ValueError(f"not a permutation: {self.image}")

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    @classmethod
    def transposition(cls, n: int, a: int, b: int) -> Permutation:
        img = list(range(n))
        img[a], img[b] = img[b], img[a]
        return cls(tuple(img))

    @property
    def order(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i]

    @cached_property
    def inverse(self) -> Permutation:
        inv = [0] * len(self.image)
        for i, j in enumerate(self.image):
            inv[j] = i
        return Permutation(tuple(inv))

    def then(self, g: Permutation) -> Permutation:
        """Return ``g . self`` (apply ``self`` first, then ``g``)."""
        if g.order != self.order:
            raise OrderMismatch("cannot compose permutations of different order")
        return Permutation(tuple(g.image[j] for j in self.image))

    def cycles(self) -> str:
        """Cycle notation with 1-based elements, fixed points omitted; ``()`` for identity."""
        seen = set()
        out = []
        for i in range(len(self.image)):
            if i in seen or self.image[i] == i:
                continue
            cyc = []
            j = i
            while j not in seen:
                seen.add(j)
                cyc.append(j + 1)
                j = self.image[j]
            out.append("(" + " ".join(map(str, cyc)) + ")")
        return "".join(out) or "()"

    @classmethod
    def from_cycles(cls, n: int, text: str) -> Permutation:
        img = list(range(n))
        for chunk in text.replace(")", " ) ").replace("(", " ( ").split(")"):
            elems = [int(t) - 1 for t in chunk.replace("(", " ").split()]
            for a, b in zip(elems, elems[1:] + elems[:1]):
                img[a] = b
        return cls(tuple(img))


def apply_permutation(m: Magma, f: Permutation) -> Magma:
    """Isomorphic copy of ``m`` under ``f``: ``r <> c = f(f^-1(r) * f^-1(c))``."""
    if f.order != m.order:
        raise OrderMismatch(f"permutation of order {f.order} applied to magma of order {m.order}")
    img, inv, t = f.image, f.inverse.image, m.table
    rng = range(m.order)
    return Magma(tuple(tuple(img[t[inv[r]][inv[c]]] for c in rng) for r in rng))


def lex_compare(a: Magma, b: Magma) -> int:
    """Row-major lexicographic comparison; returns -1, 0 or 1."""
    if a.order != b.order:
        raise OrderMismatch("cannot compare magmas of different order")
    for ra, rb in zip(a.table, b.table):
        if ra != rb:
            return -1 if ra < rb else 1
    return 0


def idempotents(m: Magma) -> frozenset[int]:
    return frozenset(a for a in range(m.order) if m.table[a][a] == a)


def occurrence_count(m: Magma, r: int, a: int) -> int:
    return m.table[r].count(a)


def idempotent_apex(m: Magma) -> int | None:
    """Largest ``|{x : e*x = e}|`` over idempotents ``e``; ``None`` without idempotents."""
    idem = idempotents(m)
    if not idem:
        return None
    return max(occurrence_count(m, e, e) for e in idem)


def first_row_candidates(m: Magma) -> frozenset[int] | None:
    """Elements that may be renamed to the first element in the lexmin copy."""
    apex = idempotent_apex(m)
    if apex is None:
        return None
    return frozenset(e for e in idempotents(m) if occurrence_count(m, e, e) == apex)


@dataclass(frozen=True)
class RowInvariant:
    fixed_count: int
    self_count: int
    is_idempotent: bool
    orbit_profile: tuple[int, ...]


def orbit_length(row: Sequence[int], a: int) -> int:
    """First ``k >= 1`` with ``g^k(a)`` among ``a, g(a), ..., g^(k-1)(a)`` where ``g(x) = row[x]``.

    This is tail length plus cycle length of the orbit of ``a``.
    """
    seen = {a}
    x = a
    while True:
        x = row[x]
        if x in seen:
            return len(seen)
        seen.add(x)


def invariant_of_row(row: Sequence[int], r: int) -> RowInvariant:
    """Invariant of the row of element ``r``; works on any fully known row."""
    n = len(row)
    return RowInvariant(
        fixed_count=sum(1 for c in range(n) if row[c] == c),
        self_count=sum(1 for c in range(n) if row[c] == r),
        is_idempotent=row[r] == r,
        orbit_profile=tuple(sorted(orbit_length(row, c) for c in range(n))),
    )


def row_invariant(m: Magma, r: int) -> RowInvariant:
    return invariant_of_row(m.table[r], r)


def row_invariants(m: Magma) -> list[RowInvariant]:
    return [row_invariant(m, r) for r in range(m.order)]


ROW_CLASSES = ("all", "idempotent", "non_idempotent")


@dataclass(frozen=True)
class OccurrenceProfile:
    """Maximum occurrence counts of values per row, per column and over the table.

    ``split`` maps ``(row_class, value_class)`` to ``(per_row, per_col, total)``
    where ``row_class`` is one of :data:`ROW_CLASSES` (rows/columns restricted to
    idempotent or non-idempotent elements) and ``value_class`` is ``"all"``,
    ``"first"`` (only the given first-row element) or ``"other"``. A class with
    no members has maxima 0.
    """

    per_row: int
    per_col: int
    total: int
    split: dict = field(default_factory=dict, compare=False)


def occurrence_tables(m: Magma) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(row_counts, col_counts, totals)``.

    ``row_counts[x, a]`` counts ``a`` in row ``x``; ``col_counts[y, a]`` counts
    ``a`` in column ``y``; ``totals[a]`` counts ``a`` in the whole table.
    """
    n = m.order
    t = m.array
    row_counts = np.zeros((n, n), dtype=np.int32)
    col_counts = np.zeros((n, n), dtype=np.int32)
    for x in range(n):
        np.add.at(row_counts[x], t[x], 1)
        np.add.at(col_counts[x], t[:, x], 1)
    totals = row_counts.sum(axis=0)
    return row_counts, col_counts, totals


def _masked_max(counts: np.ndarray, rows: np.ndarray, values: np.ndarray) -> int:
    if not rows.any() or not values.any():
        return 0
    return int(counts[np.ix_(rows, values)].max())


def occurrence_profile(m: Magma, first_row_element: int | None = None) -> OccurrenceProfile:
    n = m.order
    row_counts, col_counts, totals = occurrence_tables(m)
    diag = np.array([m.table[a][a] == a for a in range(n)])
    row_masks = {"all": np.ones(n, bool), "idempotent": diag, "non_idempotent": ~diag}
    value_masks = {"all": np.ones(n, bool)}
    if first_row_element is not None:
        first = np.zeros(n, bool)
        first[first_row_element] = True
        value_masks["first"] = first
        value_masks["other"] = ~first
    split = {}
    for (rc, rmask), (vc, vmask) in product(row_masks.items(), value_masks.items()):
        split[rc, vc] = (
            _masked_max(row_counts, rmask, vmask),
            _masked_max(col_counts, rmask, vmask),
            int(totals[vmask].max()) if vmask.any() else 0,
        )
    per_row, per_col, total = split["all", "all"]
    return OccurrenceProfile(per_row, per_col, total, split)
