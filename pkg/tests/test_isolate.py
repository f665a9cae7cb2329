import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncpit.isolate import EmptySet, MixedLengths, ceil_log2, check_isolating, isolating_index_set


def test_examples():
    r = isolating_index_set([(1, 0)])
    assert r.index_set == () and r.isolated == (1, 0)
    r = isolating_index_set([(0, 0), (0, 1), (1, 0)])
    assert r.index_set == (1,) and r.isolated == (1, 0)
    r = isolating_index_set([(0, 1), (1, 0)])
    assert r.index_set == (1,) and r.isolated == (0, 1)


def test_trace_records_splits():
    r = isolating_index_set([(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 1, 1)])
    assert r.trace[0] == (1, 1, 1)
    assert r.isolated == (1, 1, 1)


def test_errors():
    with pytest.raises(EmptySet):
        isolating_index_set([])
    with pytest.raises(MixedLengths):
        isolating_index_set([(0,), (0, 1)])


def test_check_isolating_examples():
    M = [(0, 1), (1, 0), (1, 1)]
    for m in M:
        assert check_isolating(M, [1, 2], m)
    assert not check_isolating([(0, 1), (1, 0)], [], (0, 1))


def test_ceil_log2():
    assert [ceil_log2(m) for m in (1, 2, 3, 4, 5, 1024, 1025)] == [0, 1, 2, 2, 3, 10, 11]


word_sets = st.integers(1, 24).flatmap(
    lambda D: st.sets(st.tuples(*[st.integers(0, 1)] * D), min_size=1, max_size=64))


@settings(max_examples=300, deadline=None)
@given(word_sets)
def test_isolation_properties(M):
    r = isolating_index_set(M)
    assert len(r.index_set) <= ceil_log2(len(M))
    assert r.isolated in M
    assert check_isolating(M, r.index_set, r.isolated)
    assert list(r.index_set) == sorted(set(r.index_set))
    assert isolating_index_set(sorted(M, reverse=True)) == r


def test_superset_closure():
    rng = random.Random(5)
    for _ in range(200):
        D = rng.randint(1, 20)
        M = {tuple(rng.randint(0, 1) for _ in range(D)) for _ in range(rng.randint(1, 50))}
        r = isolating_index_set(M)
        extra = rng.sample(range(1, D + 1), rng.randint(0, D))
        sup = sorted(set(r.index_set) | set(extra))
        assert check_isolating(M, sup, r.isolated)
