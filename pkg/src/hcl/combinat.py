"""Exact combinatorics for d-sets of [n]: binomials, colexicographic ranking,
and intersection pair counts.

Vertices are 1-based in the public API.  The colexicographic rank of a d-set
{v_1 < ... < v_d} is sum_t C(v_t - 1, t); ranks run over [0, C(n, d)).
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations

import numpy as np

# Vectorized paths require ranks representable in int64; beyond this everything
# falls back to exact Python integers.
INT64_SAFE = 2**62


def binom(n, k):
    """Exact C(n, k); zero when k > n, error on negative arguments."""
    if n < 0 or k < 0:
        raise ValueError(f"binom needs nonnegative arguments, got ({n}, {k})")
    return math.comb(n, k)


def validate_dset(e, n, d):
    """Check e is a strictly increasing d-tuple inside [1, n]; return it as a tuple."""
    e = tuple(int(v) for v in e)
    if len(e) != d:
        raise ValueError(f"d-set must have {d} vertices, got {len(e)}: {e}")
    for a, b in zip(e, e[1:]):
        if a >= b:
            raise ValueError(f"d-set entries must be strictly increasing: {e}")
    if e[0] < 1 or e[-1] > n:
        raise ValueError(f"d-set entries must lie in [1, {n}]: {e}")
    return e


def all_dsets(n, d):
    """Iterate every d-set of [n] in colexicographic (= rank) order."""
    return sorted(combinations(range(1, n + 1), d), key=lambda e: tuple(reversed(e)))


@lru_cache(maxsize=128)
def _colex_tables(n, d):
    # tables[t-1][c] = C(c, t) for c in [0, n); int64, valid only below INT64_SAFE
    return tuple(
        np.array([math.comb(c, t) for c in range(n)], dtype=np.int64)
        for t in range(1, d + 1)
    )


def rank_dset(e, n, d):
    """Colexicographic rank of a valid d-set of [n]."""
    e = validate_dset(e, n, d)
    return sum(math.comb(v - 1, t + 1) for t, v in enumerate(e))


def unrank_dset(rank, n, d):
    """Inverse of rank_dset: the rank-th d-set of [n] in colexicographic order."""
    total = binom(n, d)
    rank = int(rank)
    if not 0 <= rank < total:
        raise ValueError(f"rank {rank} outside [0, C({n},{d})={total})")
    out = []
    r = rank
    hi = n  # next coordinate is < hi
    for t in range(d, 0, -1):
        c = hi - 1
        while math.comb(c, t) > r:
            c -= 1
        out.append(c + 1)
        r -= math.comb(c, t)
        hi = c
    out.reverse()
    return tuple(out)


def rank_many(edges, n, d):
    """Vectorized rank_dset over an (m, d) array of sorted 1-based rows."""
    if binom(n, d) >= INT64_SAFE:
        return [rank_dset(tuple(e), n, d) for e in np.asarray(edges)]
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, d)
    tabs = _colex_tables(n, d)
    r = np.zeros(len(edges), dtype=np.int64)
    for t in range(d):
        r += tabs[t][edges[:, t] - 1]
    return r


def unrank_many(ranks, n, d):
    """Vectorized unrank_dset; returns an (m, d) int64 array with sorted rows."""
    if binom(n, d) >= INT64_SAFE:
        rows = [unrank_dset(r, n, d) for r in ranks]
        return np.array(rows, dtype=np.int64).reshape(-1, d)
    ranks = np.asarray(ranks, dtype=np.int64)
    tabs = _colex_tables(n, d)
    out = np.empty((len(ranks), d), dtype=np.int64)
    r = ranks.copy()
    for t in range(d, 0, -1):
        tab = tabs[t - 1]
        idx = np.searchsorted(tab, r, side="right") - 1
        out[:, t - 1] = idx + 1
        r -= tab[idx]
    return out


def intersection_size(e, T):
    Tset = {int(v) for v in T}
    return sum(1 for v in e if int(v) in Tset)


def c_e(e, T):
    """Ordered-pair count |e∩T|(|e∩T|-1); equals d(d-1) exactly when e is inside T."""
    r = intersection_size(e, T)
    return r * (r - 1)


def sum_ce_all_closed_form(n, k0, d):
    """Sum of c_e(T) over every d-set of [n], for |T| = k0: k0(k0-1) C(n-2, d-2)."""
    if not 0 <= k0 <= n:
        raise ValueError(f"need 0 <= k0 <= n, got k0={k0}, n={n}")
    if k0 < 2:
        return 0
    return k0 * (k0 - 1) * binom(n - 2, d - 2)


def sum_ce_in_closed_form(k0, d):
    """Sum of c_e(T) over d-subsets of T: d(d-1) C(k0, d) = k0(k0-1) C(k0-2, d-2)."""
    lhs = d * (d - 1) * binom(k0, d)
    if k0 >= 2:
        # the two closed forms must agree exactly in integers
        assert lhs == k0 * (k0 - 1) * binom(k0 - 2, d - 2)
    return lhs


def sum_ce_out_closed_form(n, k0, d):
    """Sum of c_e(T) over d-sets not inside T: k0(k0-1)(C(n-2,d-2) - C(k0-2,d-2))."""
    if not d <= k0 <= n:
        raise ValueError(f"need d <= k0 <= n, got d={d}, k0={k0}, n={n}")
    return k0 * (k0 - 1) * (binom(n - 2, d - 2) - binom(k0 - 2, d - 2))
