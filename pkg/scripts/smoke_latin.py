#!/usr/bin/env python3
"""Time canonization of random Latin squares with every propagation on.

    python scripts/smoke_latin.py --orders 16 24 32 --seeds 3
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from mlex import apply_permutation
from mlex.engine import CanonizeTimeout, EngineConfig, canonize
from mlex.oracle import GeneratorSpec, generate


@dataclass(frozen=True)
class SmokeConfig:
    orders: tuple[int, ...] = (16, 32)
    seeds: int = 1
    solver: str = "minisat"
    timeout: float = 120.0


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--orders", type=int, nargs="+", default=list(SmokeConfig.orders))
    p.add_argument("--seeds", type=int, default=SmokeConfig.seeds)
    p.add_argument("--solver", default=SmokeConfig.solver)
    p.add_argument("--timeout", type=float, default=SmokeConfig.timeout)
    args = p.parse_args()
    cfg = SmokeConfig(tuple(args.orders), args.seeds, args.solver, args.timeout)

    engine_cfg = EngineConfig(solver=cfg.solver, timeout=cfg.timeout)
    print(f"{'order':>5} {'seed':>4} {'sec':>8} {'sat':>6} {'unsat':>6} {'budget skips':>12}")
    for n in cfg.orders:
        for seed in range(cfg.seeds):
            m = generate(GeneratorSpec("latin_square", n, seed))
            t0 = time.perf_counter()
            try:
                res = canonize(m, engine_cfg)
            except CanonizeTimeout as e:
                print(f"{n:5d} {seed:4d}  timeout after {len(e.prefix)} cells")
                continue
            dt = time.perf_counter() - t0
            assert apply_permutation(m, res.witness) == res.lexmin
            s = res.stats
            print(f"{n:5d} {seed:4d} {dt:8.2f} {s.sat_calls:6d} {s.unsat_calls:6d} {s.budget_skips:12d}")


if __name__ == "__main__":
    main()
