"""End-to-end acceptance checks, one test per criterion.

Each check prints ``criterion N: PASS|FAIL ...``; the lines are also collected
into the pytest terminal summary. Run standalone with
``python tests/test_acceptance.py``.
"""

import random
import sys
import time
from functools import lru_cache
from itertools import permutations, product

import pytest

from mlex import Magma, Permutation, apply_permutation
from mlex.cnf import PermVarMap, build_bijection_constraints, build_explicit_encoding, decode_explicit_table
from mlex.engine import TOGGLES, EngineConfig, Strategy, canonize
from mlex.magma import idempotent_apex
from mlex.oracle import GeneratorSpec, brute_force_lexmin, generate, random_permutation

from conftest import CYCLIC7, EXAMPLE, EXAMPLE_LEXMIN, SCRAMBLED_Z7
from enumerate_models import projected_models

REPORT: dict[int, str] = {}
ALL_CONFIGS = [EngineConfig.from_bitmask(mask, strategy=s)
               for s in Strategy for mask in range(1 << len(TOGGLES))]


def report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
    REPORT[number] = line
    print(line)
    assert ok, line


@lru_cache(maxsize=None)
def lexmin_oracle(m):
    return brute_force_lexmin(m)[0]


def oracle_corpus():
    rng = random.Random(2024)
    randoms = [generate(GeneratorSpec("random_magma", rng.randint(3, 6), rng.randrange(2**31))) for _ in range(200)]
    latins = [generate(GeneratorSpec("latin_square", rng.randint(4, 6), rng.randrange(2**31))) for _ in range(50)]
    return randoms, latins


def test_criterion_1_scrambled_z7_every_config():
    slowest, bad = 0.0, []
    for cfg in ALL_CONFIGS:
        t0 = time.perf_counter()
        res = canonize(SCRAMBLED_Z7, cfg)
        slowest = max(slowest, time.perf_counter() - t0)
        if res.lexmin != CYCLIC7:
            bad.append((cfg.strategy.value, cfg.bitmask))
    report(1, not bad and slowest < 1.0,
           f"{len(ALL_CONFIGS)} configs, mismatches {bad}, slowest run {slowest:.3f}s (limit 1s)")


def test_criterion_2_two_element_example():
    t0 = time.perf_counter()
    res = canonize(EXAMPLE)
    dt = time.perf_counter() - t0
    ok = res.lexmin == EXAMPLE_LEXMIN and res.witness == Permutation.transposition(2, 0, 1)
    report(2, ok and dt < 0.1, f"lexmin {res.lexmin.rows(True)}, witness {res.witness.cycles()}, {dt * 1000:.1f}ms (limit 100ms)")


def test_criterion_3_oracle_equivalence():
    t0 = time.perf_counter()
    randoms, latins = oracle_corpus()
    corpus = randoms + latins
    mismatches = [i for i, m in enumerate(corpus) if canonize(m).lexmin != lexmin_oracle(m)]
    sample = random.Random(7).sample(range(len(corpus)), 20)
    runs = 0
    for i in sample:
        m = corpus[i]
        for cfg in ALL_CONFIGS:
            runs += 1
            if canonize(m, cfg).lexmin != lexmin_oracle(m):
                mismatches.append((i, cfg.strategy.value, cfg.bitmask))
    dt = time.perf_counter() - t0
    report(3, not mismatches and dt < 600,
           f"{len(randoms)} random + {len(latins)} latin, {runs} matrix runs on 20 instances, "
           f"mismatches {mismatches[:5]}, {dt:.1f}s (limit 600s)")


def test_criterion_4_first_row_apex():
    t0 = time.perf_counter()
    randoms, latins = oracle_corpus()
    rng = random.Random(4)
    extra = [generate(GeneratorSpec("random_magma", n, rng.randrange(2**31))) for n in (1, 2) for _ in range(10)]
    extra += [generate(GeneratorSpec("left_projection", n)) for n in range(1, 7)]
    checked, bad = 0, []
    for m in randoms + latins + extra:
        apex = idempotent_apex(m)
        if apex is None:
            continue
        checked += 1
        first = lexmin_oracle(m).table[0]
        leading = next((k for k, v in enumerate(first) if v != 0), len(first))
        if leading != apex:
            bad.append((m, apex, leading))
    dt = time.perf_counter() - t0
    report(4, checked > 0 and not bad and dt < 60,
           f"{checked} instances with idempotents, violations {len(bad)}, {dt:.1f}s (limit 60s)")


def test_criterion_5_invariance_and_idempotence():
    t0 = time.perf_counter()
    rng = random.Random(5)
    instances = [generate(GeneratorSpec(kind, n, rng.randrange(2**31)))
                 for kind in ("random_magma", "latin_square", "idempotent_free") for n in (3, 4, 5, 6)]
    bad = 0
    for m in instances:
        lm = canonize(m).lexmin
        bad += canonize(lm).lexmin != lm
        for _ in range(20):
            g = random_permutation(m.order, rng)
            bad += canonize(apply_permutation(m, g)).lexmin != lm
    dt = time.perf_counter() - t0
    report(5, bad == 0 and dt < 120,
           f"{len(instances)} instances x 20 permutations, failures {bad}, {dt:.1f}s (limit 120s)")


def test_criterion_6_budget_efficacy():
    t0 = time.perf_counter()
    lines, ok = [], True
    for seed in range(10):
        m = generate(GeneratorSpec("latin_square", 16, seed))
        on = canonize(m, EngineConfig())
        off = canonize(m, EngineConfig(budgets=False))
        good = on.stats.solver_calls < off.stats.solver_calls and on.lexmin == off.lexmin
        ok &= good
        lines.append(f"{on.stats.solver_calls}<{off.stats.solver_calls}" if good
                     else f"seed {seed}: {on.stats.solver_calls} vs {off.stats.solver_calls}")
    dt = time.perf_counter() - t0
    report(6, ok, f"calls on<off per instance: {', '.join(lines)}; {dt:.1f}s")


def test_criterion_7_order_32_latin():
    m = generate(GeneratorSpec("latin_square", 32, 0))
    t0 = time.perf_counter()
    res = canonize(m, EngineConfig(timeout=120))
    dt = time.perf_counter() - t0
    ok = dt < 120 and apply_permutation(m, res.witness) == res.lexmin
    report(7, ok, f"order 32 in {dt:.1f}s (limit 120s), {res.stats.solver_calls} solver calls")


def test_criterion_8_encoding_models():
    t0 = time.perf_counter()
    bad = []
    for n in (1, 2, 3):
        vmap = PermVarMap(n)
        count = len(projected_models(build_bijection_constraints(vmap), range(1, n * n + 1)))
        if count != len(list(permutations(range(n)))):
            bad.append(("bijection", n, count))
    rng = random.Random(8)
    tables = [Magma.from_rows([[0]])]
    tables += [Magma.from_rows([flat[:2], flat[2:]]) for flat in product(range(2), repeat=4)]
    tables += [Magma.from_rows([[rng.randrange(3) for _ in range(3)] for _ in range(3)]) for _ in range(20)]
    for m in tables:
        clauses, ymap = build_explicit_encoding(m)
        copies = {decode_explicit_table(k, ymap, m.order) for k in projected_models(clauses, ymap.values())}
        expected = {apply_permutation(m, Permutation(img)) for img in permutations(range(m.order))}
        if copies != expected:
            bad.append(("explicit", m))
    dt = time.perf_counter() - t0
    report(8, not bad and dt < 60,
           f"bijection n=1..3, explicit copy sets on {len(tables)} tables, failures {bad[:3]}, {dt:.1f}s (limit 60s)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
