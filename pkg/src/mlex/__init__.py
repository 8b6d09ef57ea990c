"""Lexicographically smallest isomorphic copies of finite magmas via incremental SAT."""

from .magma import Magma, Permutation, apply_permutation, lex_compare
from .textio import parse_table, parse_tables, serialize

__all__ = [
    "Magma",
    "Permutation",
    "apply_permutation",
    "lex_compare",
    "parse_table",
    "parse_tables",
    "serialize",
]
