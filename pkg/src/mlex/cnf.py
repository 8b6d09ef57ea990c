"""CNF encodings over permutation variables.

A permutation ``f`` of ``0..n-1`` is represented by Boolean variables
``x(i, j)`` meaning ``f(i) = j``. Clauses are lists of non-zero DIMACS
integers; ``-v`` is the negation of variable ``v``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .magma import Magma, Permutation

Clause = list[int]

PAIRWISE_MAX = 32
EXPLICIT_MAX_ORDER = 8


class VarPool:
    """Hands out fresh variable ids above a reserved prefix."""

    def __init__(self, top: int):
        self.top = top

    def fresh(self) -> int:
        self.top += 1
        return self.top


@dataclass(frozen=True)
class PermVarMap:
    """Dense numbering ``x(i, j) = i*n + j + 1`` of the ``n*n`` permutation variables."""

    order: int

    def __call__(self, i: int, j: int) -> int:
        return i * self.order + j + 1

    @property
    def size(self) -> int:
        return self.order * self.order

    def decode(self, var: int) -> tuple[int, int]:
        return divmod(var - 1, self.order)

    def permutation(self, model: Iterable[int]) -> Permutation:
        """Read the permutation off a model (any iterable of true/false literals)."""
        n = self.order
        img = [-1] * n
        for lit in model:
            if 0 < lit <= self.size:
                i, j = self.decode(lit)
                img[i] = j
        return Permutation(tuple(img))


def at_most_one(lits: Sequence[int], pool: VarPool, pairwise: bool = True) -> list[Clause]:
    if pairwise or len(lits) <= 4:
        return [[-a, -b] for a, b in combinations(lits, 2)]
    # sequential counter: s_k is true once some of lits[0..k] is true
    clauses = []
    prev = None
    for k, lit in enumerate(lits):
        if k == len(lits) - 1:
            if prev is not None:
                clauses.append([-prev, -lit])
            break
        s = pool.fresh()
        clauses.append([-lit, s])
        if prev is not None:
            clauses.append([-prev, s])
            clauses.append([-prev, -lit])
        prev = s
    return clauses


def exactly_one(lits: Sequence[int], pool: VarPool, pairwise: bool = True) -> list[Clause]:
    return [list(lits)] + at_most_one(lits, pool, pairwise)


def build_bijection_constraints(vmap: PermVarMap, pool: VarPool | None = None) -> list[Clause]:
    """Every row and every column of the ``x`` matrix has exactly one true variable.

    Pairwise at-most-one up to order :data:`PAIRWISE_MAX`, sequential counters
    (with auxiliary variables from ``pool``) above it.
    """
    n = vmap.order
    pool = pool or VarPool(vmap.size)
    pairwise = n <= PAIRWISE_MAX
    clauses = []
    for i in range(n):
        clauses += exactly_one([vmap(i, j) for j in range(n)], pool, pairwise)
    if n == 1:
        return clauses
    for j in range(n):
        clauses += exactly_one([vmap(i, j) for i in range(n)], pool, pairwise)
    return clauses


def raw_value_set_clauses(vmap: PermVarMap, m: Magma, r: int, c: int, values: Iterable[int]) -> list[Clause]:
    """One clause ``-x(i,r) | -x(j,c) | OR_v x(i*j, v)`` for every pair ``(i, j)``, unfiltered."""
    vals = sorted(set(values))
    if not vals:
        raise ValueError("value set must be non-empty")
    n = vmap.order
    t = m.table
    return [
        [-vmap(i, r), -vmap(j, c), *(vmap(t[i][j], v) for v in vals)]
        for i in range(n)
        for j in range(n)
    ]


def encode_value_set(vmap: PermVarMap, m: Magma, r: int, c: int, values: Iterable[int]) -> list[Clause]:
    """Clauses forcing ``r <> c`` in the copy to take one of ``values``.

    Same literal sets as :func:`raw_value_set_clauses` with tautologies dropped
    and duplicates emitted once. A clause is tautologous when its conclusion
    ``x(i*j, v)`` is one of its premises; for ``r == c`` the pairs ``(i, j)``
    and ``(j, i)`` coincide when ``i*j == j*i``.
    """
    vals = sorted(set(values))
    if not vals:
        raise ValueError("value set must be non-empty")
    n = vmap.order
    t = m.table
    r_in, c_in = r in vals, c in vals
    diag = r == c
    out = []
    for i in range(n):
        ti = t[i]
        neg_i = -vmap(i, r)
        for j in range(n):
            k = ti[j]
            if (r_in and k == i) or (c_in and k == j):
                continue
            if diag and j < i and t[j][i] == k:
                continue
            pos = [vmap(k, v) for v in vals]
            if diag and i == j:
                out.append([neg_i, *pos])
            else:
                out.append([neg_i, -vmap(j, c), *pos])
    return out


def encode_assignment(vmap: PermVarMap, m: Magma, r: int, c: int, v: int) -> list[Clause]:
    """Clauses forcing ``r <> c = v`` in the copy of ``m`` under the encoded permutation."""
    return encode_value_set(vmap, m, r, c, (v,))


def build_explicit_encoding(m: Magma) -> tuple[list[Clause], dict[tuple[int, int, int], int]]:
    """Reference encoding with one-hot variables ``y(r, c, v)`` for every cell of the copy.

    Returns the clauses and the map ``(r, c, v) -> variable``. Only meant for
    tiny orders: the clause count grows with ``n**5``.
    """
    n = m.order
    if n > EXPLICIT_MAX_ORDER:
        raise ValueError(f"explicit encoding limited to order {EXPLICIT_MAX_ORDER}, got {n}")
    vmap = PermVarMap(n)
    pool = VarPool(vmap.size)
    ymap = {}
    for r in range(n):
        for c in range(n):
            for v in range(n):
                ymap[r, c, v] = pool.fresh()
    clauses = build_bijection_constraints(vmap, pool)
    for r2 in range(n):
        for c2 in range(n):
            clauses += exactly_one([ymap[r2, c2, v] for v in range(n)], pool)
    t = m.table
    for r in range(n):
        for c in range(n):
            k = t[r][c]
            for r2 in range(n):
                for c2 in range(n):
                    for v2 in range(n):
                        lits = {-vmap(r, r2), -vmap(c, c2), -vmap(k, v2), ymap[r2, c2, v2]}
                        clauses.append(sorted(lits, key=abs))
    return clauses, ymap


def decode_explicit_table(model: Iterable[int], ymap: dict[tuple[int, int, int], int], n: int) -> Magma:
    true = {lit for lit in model if lit > 0}
    rows = [[-1] * n for _ in range(n)]
    for (r, c, v), var in ymap.items():
        if var in true:
            rows[r][c] = v
    return Magma.from_rows(rows)


def write_dimacs(path, clauses: Sequence[Clause], comments: Sequence[str] = ()) -> None:
    nvars = max((abs(lit) for cl in clauses for lit in cl), default=0)
    with open(path, "w") as fh:
        for line in comments:
            fh.write(f"c {line}\n")
        fh.write(f"p cnf {nvars} {len(clauses)}\n")
        for cl in clauses:
            fh.write(" ".join(map(str, cl)) + " 0\n")
