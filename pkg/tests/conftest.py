import random
from pathlib import Path

import pytest

from ncpit.algebra import PrimeField

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

M61 = (1 << 61) - 1


@pytest.fixture
def f101():
    return PrimeField(101)


@pytest.fixture
def f61():
    return PrimeField(M61)


@pytest.fixture
def rng():
    return random.Random(12345)


def random_matrix(field, dim, rng):
    from ncpit.algebra import Matrix

    return Matrix.from_rows([[field.sample(rng) for _ in range(dim)] for _ in range(dim)], field)
