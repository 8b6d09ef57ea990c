#!/usr/bin/env python3
"""Toggle ablation over a seeded corpus: total solver calls and time per configuration.

    python scripts/ablation.py --kind latin_square --order 12 --count 5 --csv ablation.csv
"""

from __future__ import annotations

import argparse
from collections import defaultdict
from dataclasses import dataclass

from mlex.engine import TOGGLES, EngineConfig, Strategy, canonize
from mlex.oracle import GeneratorSpec, generate
from mlex.stats import append_rows, stats_row


@dataclass(frozen=True)
class AblationConfig:
    kind: str = "latin_square"
    order: int = 12
    count: int = 5
    seed: int = 0
    solver: str = "minisat"
    csv: str | None = None


def configurations(solver: str) -> list[EngineConfig]:
    full = (1 << len(TOGGLES)) - 1
    masks = [full, 0] + [full & ~(1 << i) for i in range(len(TOGGLES))]
    return [EngineConfig.from_bitmask(mask, strategy=s, solver=solver) for s in Strategy for mask in masks]


def label(cfg: EngineConfig) -> str:
    off = [name for name in TOGGLES if not getattr(cfg, name)]
    if not off:
        return "all on"
    if len(off) == len(TOGGLES):
        return "all off"
    return "no " + ",".join(off)


def run(cfg: AblationConfig) -> None:
    instances = [generate(GeneratorSpec(cfg.kind, cfg.order, cfg.seed + i)) for i in range(cfg.count)]
    totals = defaultdict(lambda: [0, 0.0])
    rows = []
    for idx, m in enumerate(instances):
        reference = None
        for ec in configurations(cfg.solver):
            res = canonize(m, ec)
            if reference is None:
                reference = res.lexmin
            elif res.lexmin != reference:
                raise SystemExit(f"instance {idx}: {ec} disagrees")
            key = (ec.strategy.value, label(ec))
            totals[key][0] += res.stats.solver_calls
            totals[key][1] += res.stats.wall_ms
            rows.append(stats_row(f"{cfg.kind}-{cfg.order}-{cfg.seed + idx}", m.order, ec, "ok",
                                  res.stats.as_dict(), res.lexmin))
    print(f"{cfg.count} x {cfg.kind} order {cfg.order}, solver {cfg.solver}")
    print(f"{'strategy':8} {'configuration':28} {'calls':>8} {'ms':>10}")
    for (strategy, name), (calls, ms) in totals.items():
        print(f"{strategy:8} {name:28} {calls:8d} {ms:10.1f}")
    if cfg.csv:
        append_rows(cfg.csv, rows)


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(AblationConfig()).items():
        p.add_argument(f"--{name}", type=type(default) if default is not None else str, default=default)
    run(AblationConfig(**vars(p.parse_args())))


if __name__ == "__main__":
    main()
