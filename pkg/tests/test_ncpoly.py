import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncpit.algebra import CPOLY, ZZ, Matrix, PrimeField
from ncpit.ncpoly import (ALPHABET_X, PolyFormatError, SparseNCPoly, ZeroPolynomial, at, encode_bivariate,
                          encode_word, encoding_injective_check, format_ncpoly, max_degree_set, ncpoly_eval,
                          ncpoly_normalize, parse_ncpoly, parse_words)

from conftest import random_matrix

A = [[0, 1], [0, 0]]
B = [[0, 0], [1, 0]]


def commutator():
    return ncpoly_normalize([(1, (1, 2)), (-1, (2, 1))], nvars=2)


def test_normalize_examples():
    assert ncpoly_normalize([(1, (1, 2)), (-1, (1, 2))], nvars=2).is_zero()
    p = ncpoly_normalize([(2, (1,)), (3, (1,))], nvars=1)
    assert p.terms == {(1,): 5}
    assert ncpoly_normalize([(1, (1, 2)), (1, (2, 1))]).sparsity == 2


def test_zero_degree_is_none():
    assert ncpoly_normalize([], nvars=2).degree is None


def test_positions_are_one_indexed():
    w = (2, 1, 3)
    assert at(w, 1) == 2 and at(w, 3) == 3


def test_encode_examples():
    assert encode_word((2,)) == (0, 1, 1, 0)
    assert encode_bivariate(ncpoly_normalize([], nvars=2)).is_zero()
    e = encode_bivariate(ncpoly_normalize([(1, (1, 2))], nvars=2))
    assert list(e.terms) == [(0, 1, 0, 0, 1, 1, 0)]
    assert e.degree == 7 <= (2 + 2) * 2


def test_injectivity_examples():
    assert encoding_injective_check([(1, 2), (2, 1)])
    assert encoding_injective_check([])


def test_injectivity_random_sets():
    r = random.Random(3)
    for _ in range(200):
        n, d = r.randint(1, 5), r.randint(1, 8)
        words = {tuple(r.randint(1, n) for _ in range(r.randint(0, d))) for _ in range(r.randint(1, 30))}
        assert encoding_injective_check(words)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(1, 5), max_size=8), st.lists(st.integers(1, 5), max_size=8))
def test_encoding_injective_pairs(u, v):
    if u != v:
        assert encode_word(tuple(u)) != encode_word(tuple(v))
    e = encode_word(tuple(u))
    assert len(e) == sum(i + 2 for i in u) <= (5 + 2) * len(u)


def test_eval_examples():
    Am = Matrix.from_ints(A, ZZ)
    assert ncpoly_eval(ncpoly_normalize([(3, (1,))], nvars=1), [Am]) == Am.scale(3)
    one = [Matrix.from_ints([[2]], ZZ), Matrix.from_ints([[5]], ZZ)]
    assert ncpoly_eval(commutator(), one).is_zero()
    out = ncpoly_eval(commutator(), [Am, Matrix.from_ints(B, ZZ)])
    assert out == Matrix.from_ints([[1, 0], [0, -1]], ZZ)


def test_eval_linear(f101, rng):
    for _ in range(20):
        f = ncpoly_normalize([(rng.randint(1, 100), tuple(rng.randint(1, 3) for _ in range(rng.randint(0, 4))))
                              for _ in range(4)], nvars=3, modulus=101)
        g = ncpoly_normalize([(rng.randint(1, 100), tuple(rng.randint(1, 3) for _ in range(rng.randint(0, 4))))
                              for _ in range(4)], nvars=3, modulus=101)
        mats = [random_matrix(f101, 3, rng) for _ in range(3)]
        assert ncpoly_eval(f + g, mats) == ncpoly_eval(f, mats) + ncpoly_eval(g, mats)


def test_max_degree_set():
    f = ncpoly_normalize([(1, (1,)), (1, (1, 2))], nvars=2)
    m = max_degree_set(f)
    assert m.degree == 2 and m.words == {(1, 2)}
    g = ncpoly_normalize([(3, (0, 1)), (2, (1, 0)), (5, (0,))], ALPHABET_X)
    m = max_degree_set(g)
    assert m.degree == 2 and m.words == {(0, 1), (1, 0)}
    with pytest.raises(ZeroPolynomial):
        max_degree_set(ncpoly_normalize([], nvars=1))


def test_text_roundtrip():
    text = "ncpoly v1 vars=3 alphabet=z\n# comment\n\n2 z1 z3\n-1 z2 z1\n7\n"
    f = parse_ncpoly(text)
    assert f.terms == {(1, 3): 2, (2, 1): -1, (): 7}
    assert parse_ncpoly(format_ncpoly(f)) == f


@pytest.mark.parametrize("text", [
    "1 z1\n",
    "ncpoly v1 vars=2 alphabet=z\n1 z3\n",
    "ncpoly v1 vars=2 alphabet=z\nx z1\n",
    "ncpoly v1 vars=2 alphabet=x\n1 x2\n",
    "ncpoly v1 vars=3 alphabet=x\n1 x0\n",
])
def test_text_errors(text):
    with pytest.raises(PolyFormatError):
        parse_ncpoly(text)


def test_parse_words_keeps_zero_coefficients():
    alphabet, n, words = parse_words("ncpoly v1 vars=2 alphabet=x\n0 x0 x1\n5 x1 x1\n")
    assert alphabet == "x" and words == [(0, 1), (1, 1)]


def test_symbol_range_checked():
    with pytest.raises(ValueError):
        SparseNCPoly("z", 2, {(3,): 1})
