import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlex import Magma, Permutation, apply_permutation, lex_compare
from mlex.magma import (
    OrderMismatch,
    first_row_candidates,
    idempotent_apex,
    idempotents,
    occurrence_count,
    occurrence_profile,
    occurrence_tables,
    orbit_length,
    row_invariant,
    row_invariants,
)

from conftest import CYCLIC7, EXAMPLE, EXAMPLE_LEXMIN, SCRAMBLED_Z7, left_projection, magma_and_perm, magmas, random_magma


class TestMagma:
    def test_one_based_construction(self):
        assert EXAMPLE.table == ((0, 1), (1, 1))
        assert EXAMPLE.rows(one_based=True) == [[1, 2], [2, 2]]

    @pytest.mark.parametrize("rows", [[], [[0, 1]], [[0, 2], [1, 1]], [[0, -1], [1, 1]]])
    def test_rejects_malformed(self, rows):
        with pytest.raises(ValueError):
            Magma.from_rows(rows)

    def test_hashable_and_equal(self):
        assert {EXAMPLE, Magma.from_rows([[0, 1], [1, 1]])} == {EXAMPLE}

    def test_array_is_read_only(self):
        with pytest.raises(ValueError):
            EXAMPLE.array[0, 0] = 1


class TestPermutation:
    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            Permutation((0, 0))

    def test_cycles(self):
        assert Permutation.identity(3).cycles() == "()"
        assert Permutation.transposition(2, 0, 1).cycles() == "(1 2)"
        assert Permutation((1, 2, 0)).cycles() == "(1 2 3)"

    @given(st.integers(1, 8).flatmap(lambda n: st.permutations(range(n))))
    def test_cycles_round_trip(self, img):
        f = Permutation(tuple(img))
        assert Permutation.from_cycles(len(img), f.cycles()) == f

    @given(st.integers(1, 7).flatmap(lambda n: st.tuples(st.permutations(range(n)), st.permutations(range(n)))))
    def test_then_and_inverse(self, imgs):
        f, g = Permutation(tuple(imgs[0])), Permutation(tuple(imgs[1]))
        h = f.then(g)
        assert all(h(i) == g(f(i)) for i in range(f.order))
        assert f.then(f.inverse) == Permutation.identity(f.order)

    def test_then_order_mismatch(self):
        with pytest.raises(OrderMismatch):
            Permutation.identity(2).then(Permutation.identity(3))


class TestApplyPermutation:
    def test_example_swap(self):
        assert apply_permutation(EXAMPLE, Permutation.transposition(2, 0, 1)) == EXAMPLE_LEXMIN

    @given(magmas())
    def test_identity(self, m):
        assert apply_permutation(m, Permutation.identity(m.order)) == m

    @given(st.integers(1, 6).flatmap(lambda n: st.permutations(range(n))))
    def test_left_projection_fixed(self, img):
        m = left_projection(len(img))
        assert apply_permutation(m, Permutation(tuple(img))) == m

    @given(magma_and_perm())
    def test_is_homomorphism(self, mf):
        m, f = mf
        copy = apply_permutation(m, f)
        n = m.order
        assert all(f(m.table[a][b]) == copy.table[f(a)][f(b)] for a in range(n) for b in range(n))

    @given(magma_and_perm(), st.data())
    def test_action_composes(self, mf, data):
        m, f = mf
        g = Permutation(tuple(data.draw(st.permutations(range(m.order)))))
        assert apply_permutation(apply_permutation(m, f), g) == apply_permutation(m, f.then(g))

    def test_order_mismatch(self):
        with pytest.raises(OrderMismatch):
            apply_permutation(EXAMPLE, Permutation.identity(3))


class TestLexCompare:
    def test_examples(self):
        assert lex_compare(EXAMPLE_LEXMIN, EXAMPLE) == -1
        assert lex_compare(EXAMPLE, EXAMPLE) == 0
        assert lex_compare(Magma.from_rows([[2, 1], [1, 1]], one_based=True), EXAMPLE) == 1

    @given(magmas(2, 4), magmas(2, 4))
    def test_matches_flat_tuple_order(self, a, b):
        if a.order != b.order:
            with pytest.raises(OrderMismatch):
                lex_compare(a, b)
            return
        expected = (a.flat() > b.flat()) - (a.flat() < b.flat())
        assert lex_compare(a, b) == expected
        assert lex_compare(b, a) == -expected


class TestIdempotents:
    def test_scrambled_z7(self):
        assert idempotents(SCRAMBLED_Z7) == {3}
        assert idempotent_apex(SCRAMBLED_Z7) == 1
        assert first_row_candidates(SCRAMBLED_Z7) == {3}

    def test_cyclic(self):
        assert idempotents(CYCLIC7) == {0}

    def test_left_projection(self):
        m = left_projection(5)
        assert idempotents(m) == set(range(5))
        assert idempotent_apex(m) == 5
        assert first_row_candidates(m) == set(range(5))

    def test_none_without_idempotents(self):
        m = Magma.from_rows([[2, 2], [1, 1]], one_based=True)
        assert idempotents(m) == frozenset()
        assert idempotent_apex(m) is None
        assert first_row_candidates(m) is None

    def test_occurrence_count(self, rng):
        assert occurrence_count(SCRAMBLED_Z7, 3, 3) == 1
        assert occurrence_count(left_projection(4), 2, 2) == 4
        m = random_magma(5, rng)
        for r in range(5):
            for a in range(5):
                assert occurrence_count(m, r, a) == sum(1 for c in range(5) if m.table[r][c] == a)

    @given(magma_and_perm())
    def test_apex_invariant(self, mf):
        m, f = mf
        copy = apply_permutation(m, f)
        assert idempotent_apex(copy) == idempotent_apex(m)
        cands = first_row_candidates(m)
        expected = None if cands is None else frozenset(f(a) for a in cands)
        assert first_row_candidates(copy) == expected


class TestRowInvariants:
    def test_scrambled_z7_row4(self):
        inv = row_invariant(SCRAMBLED_Z7, 3)
        assert inv.fixed_count == 7
        assert inv.orbit_profile == (1,) * 7
        # no other row shares it
        assert row_invariants(SCRAMBLED_Z7).count(inv) == 1

    def test_left_projection(self):
        for inv in row_invariants(left_projection(4)):
            assert inv.self_count == 4 and inv.is_idempotent

    def test_orbit_length(self):
        # 0 -> 1 -> 2 -> 1: tail 1, cycle 2
        assert orbit_length([1, 2, 1], 0) == 3
        assert orbit_length([0, 2, 1], 0) == 1

    @given(magma_and_perm())
    def test_invariant_under_renaming(self, mf):
        m, f = mf
        copy = apply_permutation(m, f)
        for r in range(m.order):
            assert row_invariant(copy, f(r)) == row_invariant(m, r)


class TestOccurrenceProfile:
    def test_quasigroup(self):
        p = occurrence_profile(SCRAMBLED_Z7, first_row_element=3)
        assert (p.per_row, p.per_col, p.total) == (1, 1, 7)
        assert all((pr, pc) == (1, 1) for pr, pc, _ in p.split.values())

    def test_left_projection(self):
        p = occurrence_profile(left_projection(4))
        assert (p.per_row, p.per_col) == (4, 1)

    def test_recount_random(self):
        m = random_magma(6, random.Random(6))
        t = m.table
        rows = [[t[r].count(a) for a in range(6)] for r in range(6)]
        cols = [[sum(1 for r in range(6) if t[r][c] == a) for a in range(6)] for c in range(6)]
        p = occurrence_profile(m)
        assert p.per_row == max(map(max, rows))
        assert p.per_col == max(map(max, cols))
        assert p.total == max(sum(row.count(a) for row in t) for a in range(6))
        rc, cc, tot = occurrence_tables(m)
        assert rc.tolist() == rows and cc.tolist() == cols

    def test_split_by_class(self):
        # idempotent row 1 holds each value once, the others repeat a value three times
        m = Magma.from_rows([[0, 1, 2, 3], [2, 2, 2, 0], [1, 1, 1, 3], [0, 0, 0, 1]])
        p = occurrence_profile(m, first_row_element=0)
        assert p.split["idempotent", "all"][0] == 1
        assert p.split["non_idempotent", "all"][0] == 3
        assert p.split["all", "first"][0] == 3

    @given(magma_and_perm())
    @settings(max_examples=50)
    def test_profile_invariant(self, mf):
        m, f = mf
        copy = apply_permutation(m, f)
        a, b = occurrence_profile(m), occurrence_profile(copy)
        assert a == b and a.split == b.split
        ra, ca, ta = occurrence_tables(m)
        rb, cb, tb = occurrence_tables(copy)
        assert np.array_equal(rb[np.ix_(f.image, f.image)], ra)
