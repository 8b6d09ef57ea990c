"""CSV rows for per-instance run statistics."""

from __future__ import annotations

import csv
import hashlib
import io
import os

from .magma import Magma

SCHEMA_LINE = "# mlex-stats v1"
COLUMNS = (
    "instance",
    "n",
    "strategy",
    "solver",
    "toggles",
    "status",
    "sat_calls",
    "unsat_calls",
    "budget_skips",
    "witness_skips",
    "invariant_row_fixes",
    "invariant_exclusions",
    "wall_ms",
    "result_hash",
)


def result_hash(m: Magma) -> str:
    data = ",".join(map(str, m.flat())).encode()
    return hashlib.sha256(f"{m.order}:".encode() + data).hexdigest()[:16]


def stats_row(instance: str, n: int, cfg, status: str, stats: dict | None, lexmin: Magma | None) -> dict:
    row = dict.fromkeys(COLUMNS, "")
    row.update(instance=instance, n=n, strategy=cfg.strategy.value, solver=cfg.solver,
               toggles=cfg.bitmask, status=status)
    if stats:
        row.update({k: v for k, v in stats.items() if k in row})
        row["wall_ms"] = f"{stats['wall_ms']:.1f}"
    if lexmin is not None:
        row["result_hash"] = result_hash(lexmin)
    return row


def format_rows(rows: list[dict], header: bool = True) -> str:
    buf = io.StringIO()
    if header:
        buf.write(SCHEMA_LINE + "\n")
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    if header:
        writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def append_rows(path: str, rows: list[dict]) -> None:
    """Append rows to a stats file, writing the schema and header lines when it is new or empty."""
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a") as fh:
        fh.write(format_rows(rows, header=fresh))


def read_rows(text: str) -> list[dict]:
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(lines))
