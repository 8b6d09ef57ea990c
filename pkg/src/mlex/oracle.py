"""Ground truth by exhaustive search, and seeded instance generators."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import permutations

from .magma import Magma, Permutation, apply_permutation

BRUTE_FORCE_MAX_ORDER = 8
LATIN_MAX_ORDER = 64
KINDS = ("random_magma", "latin_square", "cyclic_group", "left_projection", "idempotent_free")


def _copy_vs_best(table, img, inv, best) -> int:
    """Compare the copy of ``table`` under ``img`` against ``best`` cell by cell, stopping early."""
    n = len(table)
    for r in range(n):
        tr = table[inv[r]]
        brow = best[r]
        for c in range(n):
            v = img[tr[inv[c]]]
            if v != brow[c]:
                return -1 if v < brow[c] else 1
    return 0


def brute_force_lexmin(m: Magma) -> tuple[Magma, Permutation]:
    """Least copy of ``m`` over all ``n!`` permutations, with the first permutation reaching it."""
    n = m.order
    if n > BRUTE_FORCE_MAX_ORDER:
        raise ValueError(f"brute force limited to order {BRUTE_FORCE_MAX_ORDER}, got {n}")
    table = m.table
    best = [list(row) for row in table]
    best_img = tuple(range(n))
    inv = [0] * n
    for img in permutations(range(n)):
        for i, j in enumerate(img):
            inv[j] = i
        if _copy_vs_best(table, img, inv, best) < 0:
            best = [[img[table[inv[r]][inv[c]]] for c in range(n)] for r in range(n)]
            best_img = img
    return Magma.from_rows(best), Permutation(best_img)


def verify_lexmin_certificate(m: Magma, claimed: Magma, f: Permutation) -> bool:
    """True iff ``claimed`` is the copy of ``m`` under ``f`` (validity, not minimality)."""
    return f.order == m.order == claimed.order and apply_permutation(m, f) == claimed


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    order: int
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")
        if self.order < 1:
            raise ValueError("order must be positive")
        if self.kind == "latin_square" and self.order > LATIN_MAX_ORDER:
            raise ValueError(f"latin squares limited to order {LATIN_MAX_ORDER}")
        if self.kind == "idempotent_free" and self.order < 2:
            raise ValueError("every magma of order 1 is idempotent")


def _random_row(rng: random.Random, n: int, used_in_col: list[set[int]]) -> list[int] | None:
    """A row avoiding values already used in each column, by randomized backtracking
    (augmenting paths over a shuffled bipartite graph of columns and values)."""
    match_val = {}  # value -> column
    row = [-1] * n
    cols = list(range(n))
    rng.shuffle(cols)

    def augment(col: int, seen: set[int]) -> bool:
        vals = [v for v in range(n) if v not in used_in_col[col]]
        rng.shuffle(vals)
        for v in vals:
            if v in seen:
                continue
            seen.add(v)
            if v not in match_val or augment(match_val[v], seen):
                match_val[v] = col
                row[col] = v
                return True
        return False

    for col in cols:
        if not augment(col, set()):
            return None
    return row


def random_latin_square(n: int, rng: random.Random, retries: int = 10) -> Magma:
    for _ in range(retries):
        used = [set() for _ in range(n)]
        rows = []
        for _ in range(n):
            row = _random_row(rng, n, used)
            if row is None:
                break
            for c, v in enumerate(row):
                used[c].add(v)
            rows.append(row)
        else:
            return Magma.from_rows(rows)
    raise RuntimeError(f"latin square generation failed after {retries} attempts")


def generate(spec: GeneratorSpec) -> Magma:
    n = spec.order
    rng = random.Random(f"{spec.kind}:{n}:{spec.seed}")
    if spec.kind == "random_magma":
        return Magma.from_rows([[rng.randrange(n) for _ in range(n)] for _ in range(n)])
    if spec.kind == "latin_square":
        return random_latin_square(n, rng)
    if spec.kind == "cyclic_group":
        return Magma.from_rows([[(r + c) % n for c in range(n)] for r in range(n)])
    if spec.kind == "left_projection":
        return Magma.from_rows([[r] * n for r in range(n)])
    # idempotent_free
    while True:
        rows = [[rng.randrange(n) for _ in range(n)] for _ in range(n)]
        if all(rows[a][a] != a for a in range(n)):
            return Magma.from_rows(rows)


def random_permutation(n: int, rng: random.Random) -> Permutation:
    img = list(range(n))
    rng.shuffle(img)
    return Permutation(tuple(img))
