"""Shared helpers for the test suite."""

import random
from fractions import Fraction

import pytest

from masep.linalg import QMat


def rand_rat(rng: random.Random, lo: int = 1, hi: int = 9, signed: bool = False) -> Fraction:
    num = rng.randint(lo, hi)
    if signed and rng.random() < 0.5:
        num = -num
    return Fraction(num, rng.randint(1, hi))


def rand_qmat(rng: random.Random, rows: int, cols: int, signed: bool = True) -> QMat:
    return QMat(rows, cols, [rand_rat(rng, 0 if signed else 1, 9, signed) for _ in range(rows * cols)])


def admissible_draw(rng: random.Random):
    """Rates and q with positive dressed rates and q != 1."""
    while True:
        a = rand_rat(rng)
        c = rand_rat(rng)
        q = rand_rat(rng)
        if q != 1 and a + c + q - 1 > 0:
            return a, c, q


def assert_markovian(m: QMat):
    for j, s in enumerate(m.column_sums()):
        assert s == 0, f"column {j} sums to {s}"
    for i in range(m.rows):
        for j in range(m.cols):
            if i != j:
                assert m[i, j] >= 0, f"negative off-diagonal at ({i},{j})"


@pytest.fixture
def rng():
    return random.Random(1234)
