from itertools import combinations, islice

import pytest

from triquot.quotvi import (
    count_subsets,
    enumerate_subsets,
    next_subset,
    rank_subset,
    unrank_subset,
)


def test_spec_examples():
    assert list(enumerate_subsets(3, 2)) == [(0, 1), (0, 2), (1, 2)]
    assert count_subsets(24, 4) == 10626
    assert next(iter(enumerate_subsets(3, 2, start_rank=2))) == (1, 2)


def test_matches_itertools():
    for n, r in ((5, 1), (6, 3), (7, 7 - 1), (8, 4)):
        assert list(enumerate_subsets(n, r)) == list(combinations(range(n), r))


def test_rank_unrank_round_trip():
    n, r = 8, 3
    for rank, subset in enumerate(combinations(range(n), r)):
        assert rank_subset(n, subset) == rank
        assert unrank_subset(n, r, rank) == subset


def test_restart_mid_stream():
    n, r = 9, 4
    full = list(combinations(range(n), r))
    for start in (0, 1, 17, count_subsets(n, r) - 1):
        tail = list(islice(enumerate_subsets(n, r, start_rank=start), 5))
        assert tail == full[start:start + 5]


def test_next_subset_terminates():
    cur = (2, 3, 4)
    assert next_subset(5, cur) is None
    assert next_subset(5, (0, 3, 4)) == (1, 2, 3)


def test_guards():
    with pytest.raises(ValueError):
        list(enumerate_subsets(3, 3))
    with pytest.raises(ValueError):
        list(enumerate_subsets(3, 0))
