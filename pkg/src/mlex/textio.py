"""Reading and writing multiplication tables.

Native format: the first non-comment line holds ``n``, followed by ``n`` lines
of ``n`` whitespace-separated integers in ``1..n``. ``#`` starts a comment.
Several tables may follow each other, separated by blank lines.

CSV format: ``n`` lines of ``n`` comma-separated integers; ``n`` is taken from
the first line.
"""

from __future__ import annotations

import re
from typing import Iterator

from .magma import Magma

FORMATS = ("native", "csv")


class TableParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


def _content_lines(text: str) -> Iterator[tuple[int, str]]:
    """Yield ``(line_number, stripped_content)`` for lines that are not blank after comment removal."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        if content.strip():
            yield lineno, content


def _ints(content: str, lineno: int, sep: str | None) -> list[tuple[int, int]]:
    """Parse integers on one line, returning ``(value, column)`` pairs (1-based columns)."""
    pattern = r"[^,]+" if sep == "," else r"\S+"
    out = []
    for match in re.finditer(pattern, content):
        tok = match.group().strip()
        col = match.start() + 1 + (len(match.group()) - len(match.group().lstrip()))
        try:
            out.append((int(tok), col))
        except ValueError:
            raise TableParseError(f"expected an integer, got {tok!r}", lineno, col) from None
    return out


def _check_row(values: list[tuple[int, int]], n: int, lineno: int) -> list[int]:
    if len(values) != n:
        raise TableParseError(f"ragged row: {len(values)} entries, expected {n}", lineno)
    for v, col in values:
        if not 1 <= v <= n:
            raise TableParseError(f"domain violation: {v} not in 1..{n}", lineno, col)
    return [v for v, _ in values]


def _parse_native(text: str) -> Iterator[Magma]:
    lines = _content_lines(text)
    for lineno, content in lines:
        header = _ints(content, lineno, None)
        if len(header) != 1:
            raise TableParseError("expected the table order on its own line", lineno)
        n, col = header[0]
        if n < 1:
            raise TableParseError(f"table order must be positive, got {n}", lineno, col)
        rows = []
        for _ in range(n):
            try:
                rlineno, rcontent = next(lines)
            except StopIteration:
                raise TableParseError(f"table truncated: expected {n} rows, got {len(rows)}") from None
            rows.append(_check_row(_ints(rcontent, rlineno, None), n, rlineno))
        yield Magma.from_rows(rows, one_based=True)


def _parse_csv(text: str) -> Iterator[Magma]:
    lines = list(_content_lines(text))
    if not lines:
        return
    n = len(_ints(lines[0][1], lines[0][0], ","))
    if len(lines) != n:
        raise TableParseError(f"expected {n} rows (inferred from the first row), got {len(lines)}")
    yield Magma.from_rows(
        [_check_row(_ints(content, lineno, ","), n, lineno) for lineno, content in lines],
        one_based=True,
    )


def parse_tables(text: str, fmt: str = "native") -> list[Magma]:
    """Parse every table in ``text``; an empty input yields an empty list."""
    if fmt == "native":
        return list(_parse_native(text))
    if fmt == "csv":
        return list(_parse_csv(text))
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def parse_table(text: str, fmt: str = "native") -> Magma:
    tables = parse_tables(text, fmt)
    if len(tables) != 1:
        raise TableParseError(f"expected exactly one table, found {len(tables)}")
    return tables[0]


def split_native_blocks(text: str) -> list[tuple[int, str]]:
    """Split native text into blank-line separated blocks, keeping the starting line number.

    Lets callers parse each table on its own and keep going after a bad one.
    """
    blocks, current, start = [], [], None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.strip():
            if start is None:
                start = lineno
            current.append(raw)
        elif current:
            blocks.append((start, "\n".join(current)))
            current, start = [], None
    if current:
        blocks.append((start, "\n".join(current)))
    return [(s, b) for s, b in blocks if any(True for _ in _content_lines(b))]


def serialize(m: Magma, fmt: str = "native") -> str:
    rows = m.rows(one_based=True)
    if fmt == "native":
        return f"{m.order}\n" + "".join(" ".join(map(str, row)) + "\n" for row in rows)
    if fmt == "csv":
        return "".join(",".join(map(str, row)) + "\n" for row in rows)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def serialize_many(tables: list[Magma], fmt: str = "native") -> str:
    return "\n".join(serialize(m, fmt) for m in tables)
