import random

import pytest
from hypothesis import strategies as st

from mlex import Magma, Permutation, parse_table

SCRAMBLED_Z7_TEXT = """\
7
7 5 6 1 4 2 3
5 3 1 2 6 7 4
6 1 5 3 7 4 2
1 2 3 4 5 6 7
4 6 7 5 2 3 1
2 7 4 6 3 1 5
3 4 2 7 1 5 6
"""

SCRAMBLED_Z7 = parse_table(SCRAMBLED_Z7_TEXT)
CYCLIC7 = Magma.from_rows([[(r + c) % 7 for c in range(7)] for r in range(7)])
EXAMPLE = Magma.from_rows([[1, 2], [2, 2]], one_based=True)
EXAMPLE_LEXMIN = Magma.from_rows([[1, 1], [1, 2]], one_based=True)


def left_projection(n):
    return Magma.from_rows([[r] * n for r in range(n)])


def random_magma(n, rng):
    return Magma.from_rows([[rng.randrange(n) for _ in range(n)] for _ in range(n)])


@st.composite
def magmas(draw, min_order=1, max_order=5):
    n = draw(st.integers(min_order, max_order))
    cells = draw(st.lists(st.integers(0, n - 1), min_size=n * n, max_size=n * n))
    return Magma.from_rows([cells[r * n:(r + 1) * n] for r in range(n)])


@st.composite
def magma_and_perm(draw, min_order=1, max_order=5):
    m = draw(magmas(min_order, max_order))
    img = draw(st.permutations(range(m.order)))
    return m, Permutation(tuple(img))


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    if module is None or not module.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.REPORT):
        terminalreporter.write_line(module.REPORT[number])
