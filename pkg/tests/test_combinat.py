"""Colex ranking, per-edge coefficients, and closed-form coefficient sums."""

import math
from itertools import combinations

import numpy as np
import pytest

from hcl.combinat import (
    all_dsets,
    binom,
    c_e,
    intersection_size,
    rank_dset,
    rank_many,
    sum_ce_all_closed_form,
    sum_ce_in_closed_form,
    sum_ce_out_closed_form,
    unrank_dset,
    unrank_many,
    validate_dset,
)


def colex_sorted(n, d):
    # independent oracle: enumerate all d-sets, sort by reversed tuple
    return sorted(combinations(range(1, n + 1), d), key=lambda e: tuple(reversed(e)))


def test_binom_matches_math_comb():
    for n in range(0, 30):
        for k in range(0, n + 2):
            assert binom(n, k) == math.comb(n, k)
    with pytest.raises(ValueError):
        binom(-1, 2)
    with pytest.raises(ValueError):
        binom(3, -1)


def test_binom_large_exact():
    # beyond float64 precision; must stay exact
    assert binom(1000, 8) == math.comb(1000, 8)
    assert binom(300, 8) == math.comb(300, 8)


def test_all_dsets_is_colex_order():
    for n, d in [(5, 3), (7, 3), (8, 4), (9, 5)]:
        assert all_dsets(n, d) == colex_sorted(n, d)


def test_rank_unrank_roundtrip_exhaustive():
    for n, d in [(6, 3), (8, 3), (8, 4), (10, 5)]:
        for r, e in enumerate(colex_sorted(n, d)):
            assert rank_dset(e, n, d) == r
            assert unrank_dset(r, n, d) == e


def test_rank_is_independent_of_n():
    # colex rank depends only on the elements, not the ambient n
    e = (2, 5, 9)
    assert rank_dset(e, 10, 3) == rank_dset(e, 40, 3)


def test_rank_many_matches_scalar():
    rng = np.random.default_rng(0)
    n, d = 25, 4
    for _ in range(20):
        rows = np.array([sorted(rng.choice(np.arange(1, n + 1), d, replace=False))
                         for _ in range(50)], dtype=np.int64)
        ranks = rank_many(rows, n, d)
        for i in range(50):
            assert ranks[i] == rank_dset(tuple(rows[i]), n, d)


def test_unrank_many_matches_scalar():
    rng = np.random.default_rng(1)
    n, d = 30, 5
    total = binom(n, d)
    ranks = rng.integers(0, total, size=200)
    edges = unrank_many(ranks, n, d)
    for i, r in enumerate(ranks):
        assert tuple(edges[i]) == unrank_dset(int(r), n, d)


def test_unrank_many_big_integer_path():
    # C(n, d) >= 2**62 forces the arbitrary-precision fallback
    n, d = 1000, 8
    assert binom(n, d) >= 2**62
    total = binom(n, d)
    rng = np.random.default_rng(2)
    ranks = [int(rng.integers(0, 2**62)) + (total - 2**62) for _ in range(5)]
    ranks += [0, total - 1]
    edges = unrank_many(np.array(ranks, dtype=object), n, d)
    back = rank_many(np.asarray(edges, dtype=np.int64), n, d)
    for want, got in zip(ranks, back):
        assert int(got) == want
    assert tuple(edges[-1]) == (n - d + 1, n - d + 2, n - d + 3, n - d + 4,
                                n - d + 5, n - d + 6, n - d + 7, n)


def test_validate_dset_rejects_bad_input():
    validate_dset((1, 2, 3), 5, 3)
    with pytest.raises(ValueError):
        validate_dset((1, 2, 2), 5, 3)  # repeat
    with pytest.raises(ValueError):
        validate_dset((3, 2, 1), 5, 3)  # unsorted
    with pytest.raises(ValueError):
        validate_dset((1, 2, 6), 5, 3)  # out of range
    with pytest.raises(ValueError):
        validate_dset((1, 2), 5, 3)  # wrong size


def test_ce_quadratic_in_overlap():
    e = (1, 2, 3, 4)
    assert intersection_size(e, (5, 6)) == 0
    assert c_e(e, (5, 6)) == 0
    assert c_e(e, (1, 5, 6)) == 0          # r=1 -> r(r-1)=0
    assert c_e(e, (1, 2, 6)) == 2          # r=2
    assert c_e(e, (1, 2, 3)) == 6          # r=3
    assert c_e(e, (1, 2, 3, 4, 9)) == 12   # r=4


def test_sum_ce_all_matches_bruteforce():
    for n, d, k0 in [(6, 3, 3), (8, 3, 5), (7, 4, 4), (9, 3, 6)]:
        T = tuple(range(1, k0 + 1))
        brute = sum(c_e(e, T) for e in combinations(range(1, n + 1), d))
        assert sum_ce_all_closed_form(n, k0, d) == brute


def test_sum_ce_in_matches_bruteforce():
    for d, k0 in [(3, 3), (3, 5), (4, 4), (4, 7), (5, 6)]:
        T = tuple(range(1, k0 + 1))
        brute = sum(c_e(e, T) for e in combinations(T, d))
        assert sum_ce_in_closed_form(k0, d) == brute


def test_sum_ce_out_fixture_and_bruteforce():
    # n=6, d=3, k0=3: 18 background d-sets contribute total coefficient 18
    assert sum_ce_out_closed_form(6, 3, 3) == 18
    for n, d, k0 in [(6, 3, 3), (8, 3, 5), (9, 4, 5)]:
        T = tuple(range(1, k0 + 1))
        brute = sum(c_e(e, T) for e in combinations(range(1, n + 1), d)
                    if not set(e) <= set(T))
        assert sum_ce_out_closed_form(n, k0, d) == brute


def test_sum_ce_split_is_consistent():
    # all = in + out whenever both sides are defined
    for n, d, k0 in [(7, 3, 4), (10, 4, 6), (12, 5, 8)]:
        assert (sum_ce_all_closed_form(n, k0, d)
                == sum_ce_in_closed_form(k0, d) + sum_ce_out_closed_form(n, k0, d))


def test_counting_identity_exhaustive_small():
    # d(d-1) C(k0, d) == k0 (k0-1) C(k0-2, d-2) for all 3 <= d <= k0 <= 10
    for k0 in range(3, 11):
        for d in range(3, k0 + 1):
            lhs = d * (d - 1) * binom(k0, d)
            rhs = k0 * (k0 - 1) * binom(k0 - 2, d - 2)
            assert lhs == rhs
