"""``mlex`` command line: canonize, isocheck, dedupe, bench, gen, oracle-check.

Exit codes: 0 success, 1 input error, 2 timeout, 3 configurations disagree
(bench), 4 engine/oracle mismatch (oracle-check), 10 non-isomorphic
(isocheck), 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from itertools import product

from . import budget
from .engine import TOGGLES, CanonizeTimeout, EngineConfig, EngineError, Strategy, canonize
from .magma import Magma, Permutation
from .oracle import KINDS, GeneratorSpec, brute_force_lexmin, generate, verify_lexmin_certificate
from .solver import BACKENDS, DEFAULT_BACKEND, resolve_backend
from .stats import append_rows, format_rows, stats_row
from .textio import FORMATS, TableParseError, parse_tables, serialize, split_native_blocks

EXIT_OK, EXIT_INPUT, EXIT_TIMEOUT, EXIT_MISMATCH, EXIT_ORACLE, EXIT_NONISO, EXIT_USAGE = 0, 1, 2, 3, 4, 10, 64


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def engine_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("engine")
    g.add_argument("--strategy", choices=[s.value for s in Strategy], default=Strategy.BINARY.value)
    g.add_argument("--no-first-row", action="store_true")
    g.add_argument("--no-budgets", action="store_true")
    g.add_argument("--no-invariants", action="store_true")
    g.add_argument("--no-midrow", action="store_true")
    g.add_argument("--no-witness", action="store_true")
    g.add_argument("--solver", default=DEFAULT_BACKEND, help=f"one of {sorted(BACKENDS)} or a pysat solver name")
    g.add_argument("--timeout", type=_positive_float, default=1800.0, help="seconds per instance")
    g.add_argument("--jobs", type=_positive_int, default=None, help="worker processes (default: all cores)")
    g.add_argument("--format", choices=FORMATS, default="native")
    return p


def config_from_args(args) -> EngineConfig:
    try:
        resolve_backend(args.solver)
    except ValueError as e:
        raise UsageError(str(e)) from None
    return EngineConfig(
        strategy=Strategy(args.strategy),
        first_row=not args.no_first_row,
        budgets=not args.no_budgets,
        row_invariants=not args.no_invariants,
        midrow=not args.no_midrow,
        witness=not args.no_witness,
        solver=args.solver,
        timeout=args.timeout,
    )


def _run_one(job):
    """Worker entry point; returns plain data so results cross process boundaries."""
    rows, cfg, dump = job
    m = Magma(rows)
    try:
        res = canonize(m, cfg, dump_cnf=dump)
    except CanonizeTimeout as e:
        return {"status": "timeout", "prefix": e.prefix, "stats": e.stats.as_dict()}
    return {
        "status": "ok",
        "lexmin": res.lexmin.table,
        "witness": res.witness.image,
        "stats": res.stats.as_dict(),
    }


def run_jobs(jobs: list, workers: int | None):
    workers = workers or os.cpu_count() or 1
    if workers == 1 or len(jobs) <= 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(_run_one, jobs))


def _load_all(paths: list[str], fmt: str) -> list[tuple[str, Magma]]:
    out = []
    for path in paths:
        for i, m in enumerate(parse_tables(_read(path), fmt), start=1):
            out.append((f"{'stdin' if path == '-' else path}#{i}", m))
    return out


# subcommands


def cmd_canonize(args) -> int:
    cfg = config_from_args(args)
    instances = _load_all(args.paths, args.format)
    if args.dump_cnf and len(instances) != 1:
        raise UsageError("--dump-cnf needs exactly one input table")
    jobs = [(m.table, cfg, args.dump_cnf) for _, m in instances]
    results = run_jobs(jobs, args.jobs)
    out, rows, code = [], [], EXIT_OK
    for (name, m), res in zip(instances, results):
        if res["status"] == "timeout":
            prefix = " ".join(str(v + 1) for v in res["prefix"])
            print(f"{name}: timeout; committed prefix ({len(res['prefix'])} cells): {prefix}", file=sys.stderr)
            rows.append(stats_row(name, m.order, cfg, "timeout", res["stats"], None))
            code = EXIT_TIMEOUT
            continue
        lexmin = Magma(res["lexmin"])
        text = serialize(lexmin, args.format)
        if args.witness:
            text = f"# witness {Permutation(res['witness']).cycles()}\n" + text
        out.append(text)
        rows.append(stats_row(name, m.order, cfg, "ok", res["stats"], lexmin))
    _write(args.output, "\n".join(out))
    if args.stats:
        if args.stats == "-":
            sys.stdout.write(format_rows(rows))
        else:
            append_rows(args.stats, rows)
    return code


def _canonical(m: Magma, cfg: EngineConfig) -> Magma:
    return canonize(m, cfg).lexmin


def cmd_isocheck(args) -> int:
    cfg = config_from_args(args)
    a = parse_tables(_read(args.path_a), args.format)
    b = parse_tables(_read(args.path_b), args.format)
    if len(a) != 1 or len(b) != 1:
        raise TableParseError("isocheck expects exactly one table per input")
    a, b = a[0], b[0]
    if a.order != b.order:
        print(f"order mismatch: {a.order} vs {b.order}", file=sys.stderr)
        return EXIT_INPUT
    try:
        same = _canonical(a, cfg) == _canonical(b, cfg)
    except CanonizeTimeout as e:
        print(f"timeout: {e}", file=sys.stderr)
        return EXIT_TIMEOUT
    print("isomorphic" if same else "non-isomorphic")
    return EXIT_OK if same else EXIT_NONISO


def cmd_dedupe(args) -> int:
    cfg = config_from_args(args)
    text = _read(args.path)
    tables, errors = [], 0
    blocks = split_native_blocks(text) if args.format == "native" else [(1, text)]
    for start, block in blocks:
        try:
            parsed = parse_tables(block, args.format)
        except TableParseError as e:
            print(f"{args.path}: table starting at line {start}: {e}", file=sys.stderr)
            errors += 1
            continue
        tables.extend(parsed)
    results = run_jobs([(m.table, cfg, None) for m in tables], args.jobs)
    classes: dict = {}
    for idx, res in enumerate(results, start=1):
        if res["status"] != "ok":
            print(f"{args.path}: table {idx}: timeout", file=sys.stderr)
            return EXIT_TIMEOUT
        classes.setdefault(res["lexmin"], []).append(idx)
    reps = sorted(classes, key=lambda t: (len(t), t))
    out = []
    for k, rep in enumerate(reps, start=1):
        members = classes[rep]
        out.append(f"# class {k}: size {len(members)}, members {' '.join(map(str, members))}\n"
                   + serialize(Magma(rep), args.format))
    _write(args.output, "\n".join(out))
    print(f"{len(tables)} tables, {len(reps)} classes", file=sys.stderr)
    return EXIT_INPUT if errors else EXIT_OK


def _matrix(args, base: EngineConfig) -> list[EngineConfig]:
    """``single`` runs the configuration given by the engine flags; the others
    cross toggle subsets with ``--strategies`` and ``--solvers``."""
    if args.matrix == "single":
        return [base]
    strategies = [Strategy(s) for s in args.strategies.split(",")]
    solvers = args.solvers.split(",") if args.solvers else [base.solver]
    if args.matrix == "ablation":
        full = (1 << len(TOGGLES)) - 1
        masks = [full, 0] + [full & ~(1 << i) for i in range(len(TOGGLES))]
    else:
        masks = list(range(1 << len(TOGGLES)))
    return [
        EngineConfig.from_bitmask(mask, strategy=s, solver=solver, timeout=base.timeout)
        for solver, s, mask in product(solvers, strategies, masks)
    ]


def cmd_bench(args) -> int:
    base = config_from_args(args)
    configs = _matrix(args, base)
    instances = _load_all([args.corpus], args.format)
    jobs = [(m.table, cfg, None) for _, m in instances for cfg in configs]
    results = iter(run_jobs(jobs, args.jobs))
    rows, code = [], EXIT_OK
    for name, m in instances:
        hashes = {}
        for cfg in configs:
            res = next(results)
            lexmin = Magma(res["lexmin"]) if res["status"] == "ok" else None
            rows.append(stats_row(name, m.order, cfg, res["status"], res["stats"], lexmin))
            if lexmin is not None:
                hashes.setdefault(lexmin, []).append(cfg)
        if len(hashes) > 1:
            print(f"{name}: configurations disagree on the canonical form", file=sys.stderr)
            for lexmin, cfgs in hashes.items():
                labels = ", ".join(f"{c.strategy.value}/{c.solver}/{c.bitmask:05b}" for c in cfgs)
                print(f"  {labels}:\n{serialize(lexmin)}", file=sys.stderr)
            code = EXIT_MISMATCH
    if args.stats and args.stats != "-":
        append_rows(args.stats, rows)
    else:
        sys.stdout.write(format_rows(rows))
    return code


def cmd_gen(args) -> int:
    try:
        specs = [GeneratorSpec(args.kind, args.order, args.seed + i) for i in range(args.count)]
    except ValueError as e:
        raise UsageError(str(e)) from None
    _write(args.output, "\n".join(serialize(generate(s)) for s in specs))
    return EXIT_OK


def _oracle_instances(args) -> list[tuple[dict, Magma]]:
    rng = random.Random(args.seed)
    out = []
    for i in range(args.count):
        kind = args.kinds[i % len(args.kinds)]
        lo = max(args.min_order, 2 if kind == "idempotent_free" else 1)
        spec = GeneratorSpec(kind, rng.randint(lo, args.max_order), rng.randrange(2**31))
        out.append(({"kind": spec.kind, "order": spec.order, "seed": spec.seed}, generate(spec)))
    for n in range(1, args.exhaustive + 1):
        for flat in product(range(n), repeat=n * n):
            m = Magma.from_rows([flat[r * n:(r + 1) * n] for r in range(n)])
            out.append(({"kind": "exhaustive", "order": n}, m))
    return out


def cmd_oracle_check(args) -> int:
    injected = set(args.inject_fault or ()) - budget.FAULTS
    budget.FAULTS.update(injected)
    try:
        return _oracle_check(args)
    finally:
        budget.FAULTS.difference_update(injected)


def _oracle_check(args) -> int:
    base = config_from_args(args)
    all_configs = [EngineConfig.from_bitmask(mask, strategy=s, solver=base.solver, timeout=base.timeout)
                   for s in Strategy for mask in range(1 << len(TOGGLES))]
    instances = _oracle_instances(args)
    sample = set(random.Random(args.seed + 1).sample(range(len(instances)), min(args.matrix_sample, len(instances))))
    checked = 0
    for idx, (origin, m) in enumerate(instances):
        expected, _ = brute_force_lexmin(m)
        configs = all_configs if idx in sample else [base]
        for cfg in configs:
            checked += 1
            try:
                res = canonize(m, cfg)
                got, ok = res.lexmin, verify_lexmin_certificate(m, res.lexmin, res.witness)
                error = None
            except (EngineError, ValueError) as e:
                got, ok, error = None, False, str(e)
            if got == expected and ok:
                continue
            bundle = {
                "origin": origin,
                "instance": m.rows(one_based=True),
                "config": {"strategy": cfg.strategy.value, "toggles": cfg.bitmask, "solver": cfg.solver},
                "expected": expected.rows(one_based=True),
                "got": got.rows(one_based=True) if got is not None else None,
                "error": error,
                "faults": sorted(budget.FAULTS),
            }
            with open(args.repro, "w") as fh:
                json.dump(bundle, fh, indent=1)
            print(f"mismatch on instance {idx + 1} ({origin}); repro written to {args.repro}", file=sys.stderr)
            return EXIT_ORACLE
    print(f"ok: {len(instances)} instances, {checked} engine runs agree with brute force")
    return EXIT_OK


def build_parser() -> Parser:
    parser = Parser(prog="mlex", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)
    common = [engine_flags()]

    p = sub.add_parser("canonize", parents=common, help="print the lexmin copy of each input table")
    p.add_argument("paths", nargs="+", help="table files; '-' reads standard input")
    p.add_argument("--witness", action="store_true", help="prefix each table with its witness in cycle notation")
    p.add_argument("--stats", metavar="PATH", help="append one CSV stats row per table ('-' for stdout)")
    p.add_argument("--dump-cnf", metavar="PATH", help="write the final clause set plus the last trial as DIMACS")
    p.add_argument("-o", "--output", metavar="PATH")
    p.set_defaults(func=cmd_canonize)

    p = sub.add_parser("isocheck", parents=common, help="decide isomorphism by comparing lexmin copies")
    p.add_argument("path_a")
    p.add_argument("path_b")
    p.set_defaults(func=cmd_isocheck)

    p = sub.add_parser("dedupe", parents=common, help="group tables by canonical form")
    p.add_argument("path")
    p.add_argument("-o", "--output", metavar="PATH")
    p.set_defaults(func=cmd_dedupe)

    p = sub.add_parser("bench", parents=common, help="run a configuration matrix over a corpus")
    p.add_argument("corpus")
    p.add_argument("--matrix", choices=("single", "ablation", "full"), default="ablation")
    p.add_argument("--strategies", default="lus,bin2", help="comma-separated subset of lus,bin2")
    p.add_argument("--solvers", help="comma-separated solver ids (default: --solver)")
    p.add_argument("--stats", metavar="PATH", help="append CSV rows here instead of stdout")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="generate seeded random tables")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--order", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=_positive_int, default=1)
    p.add_argument("-o", "--output", metavar="PATH")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle-check", parents=common, help="compare the engine with brute force on random tables")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-order", type=_positive_int, default=3)
    p.add_argument("--max-order", type=_positive_int, default=6)
    p.add_argument("--kinds", type=lambda s: s.split(","), default=["random_magma", "latin_square", "idempotent_free"])
    p.add_argument("--matrix-sample", type=int, default=20,
                   help="instances also run under every toggle subset and strategy")
    p.add_argument("--exhaustive", type=int, default=0, metavar="N", help="also sweep every table of order <= N")
    p.add_argument("--repro", default="mlex-repro.json")
    p.add_argument("--inject-fault", action="append", choices=["double-budget-decrement"], help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def _validate(args) -> None:
    if getattr(args, "command", None) == "oracle-check":
        if args.max_order > 8 or args.min_order > args.max_order:
            raise UsageError("orders must satisfy min-order <= max-order <= 8")
        if args.exhaustive > 3:
            raise UsageError("--exhaustive is limited to orders <= 3")
        bad = [k for k in args.kinds if k not in KINDS]
        if bad or not args.kinds:
            raise UsageError(f"unknown kinds {bad}; expected some of {KINDS}")
        if args.count < 0 or args.matrix_sample < 0:
            raise UsageError("--count and --matrix-sample must be non-negative")
    if getattr(args, "command", None) == "bench":
        bad = [s for s in args.strategies.split(",") if s not in {s.value for s in Strategy}]
        if bad:
            raise UsageError(f"unknown strategies {bad}")
        for solver in (args.solvers or "").split(","):
            if solver:
                try:
                    resolve_backend(solver)
                except ValueError as e:
                    raise UsageError(str(e)) from None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"mlex: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (TableParseError, OSError) as e:
        print(f"mlex: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
