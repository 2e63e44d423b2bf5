"""Planted-clique hypergraph model and its adjacency projection.

A sample plants all C(k, d) hyperedges on a uniform k-subset S of [n] and adds
every other d-set independently with probability p.  Only the non-planted
("out") hyperedges are stored; the planted family is implicit in S.  The
projection A counts, for each vertex pair, the present hyperedges containing
both; diag(A) = 0.

Vertex ids are 1-based in samples and files; matrix row i-1 is vertex i.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .combinat import INT64_SAFE, binom, rank_many, unrank_dset, unrank_many
from .errors import MemoryCapError
from .seeding import rng_from

# refuse samples whose expected out-edge count would exceed this
EDGE_RETENTION_CAP = 2 * 10**8
_PERM_CAP = 1 << 23        # largest eligible population we shuffle outright
_ENUM_CAP = 1 << 20        # largest planted d-set family we enumerate
_BRUTE_CAP = 10**6         # brute-force projection guard on C(n, d)


@dataclass(frozen=True)
class ModelParams:
    n: int
    d: int
    k: int
    p: float

    def __post_init__(self):
        if not 3 <= self.d <= self.n:
            raise ValueError(f"need 3 <= d <= n, got d={self.d}, n={self.n}")
        if not 0 <= self.k <= self.n:
            raise ValueError(f"need 0 <= k <= n, got k={self.k}")
        if not 0.0 <= float(self.p) <= 1.0:
            raise ValueError(f"need 0 <= p <= 1, got p={self.p}")

    @property
    def degenerate(self):
        """k < d plants no hyperedge: the model coincides with the k = 0 null."""
        return self.k < self.d


@dataclass(frozen=True)
class HypergraphSample:
    params: ModelParams
    S: tuple                 # sorted 1-based planted vertices
    out_edges: np.ndarray    # (m, d) int64, sorted rows, colex order, none inside S

    def __post_init__(self):
        object.__setattr__(self, "S", tuple(int(v) for v in self.S))
        edges = np.asarray(self.out_edges, dtype=np.int64).reshape(-1, self.params.d)
        object.__setattr__(self, "out_edges", edges)
        if len(self.S) != self.params.k:
            raise ValueError(f"|S|={len(self.S)} but k={self.params.k}")

    @property
    def n(self):
        return self.params.n

    def validate(self):
        """Check structural invariants (meant for tests; sampling guarantees them)."""
        n, d, k = self.params.n, self.params.d, self.params.k
        S = np.array(self.S, dtype=np.int64)
        assert len(set(self.S)) == k and (k == 0 or (1 <= S.min() and S.max() <= n))
        assert all(a < b for a, b in zip(self.S, self.S[1:]))
        e = self.out_edges
        if e.size:
            assert e.min() >= 1 and e.max() <= n
            assert (np.diff(e, axis=1) > 0).all()
            in_S = np.zeros(n + 1, dtype=bool)
            in_S[S] = True
            assert not in_S[e].all(axis=1).any(), "out-edge inside S"
            ranks = rank_many(e, n, d)
            assert len(set(int(r) for r in np.atleast_1d(ranks))) == len(e)
        return True


def _binomial_exact(rng, N, p):
    # binomial additivity lets huge populations be summed over int64-sized blocks
    if p <= 0:
        return 0
    if p >= 1:
        return int(N)
    total, remaining, block = 0, int(N), 1 << 62
    while remaining > 0:
        b = min(remaining, block)
        total += int(rng.binomial(b, p))
        remaining -= b
    return total


def _distinct_uniform(rng, N, m):
    """First m distinct values of an i.i.d. uniform stream on [0, N): a uniform m-subset."""
    acc = np.empty(0, dtype=np.int64)
    while acc.size < m:
        need = m - acc.size
        batch = rng.integers(0, N, size=need + need // 4 + 64, dtype=np.int64)
        uniq, first = np.unique(batch, return_index=True)
        fresh = uniq[np.argsort(first, kind="stable")]  # draw order
        if acc.size:
            fresh = fresh[~np.isin(fresh, acc)]
        acc = np.concatenate([acc, fresh[:need]])
    return np.sort(acc)


def _rejection_ranks_vec(rng, n, d, S, m):
    # C(n, d) fits int64 but the planted family is too large to enumerate
    N = binom(n, d)
    in_S = np.zeros(n + 2, dtype=bool)
    if len(S):
        in_S[np.asarray(S, dtype=np.int64)] = True
    acc = np.empty(0, dtype=np.int64)
    while acc.size < m:
        need = m - acc.size
        batch = rng.integers(0, N, size=need + need // 4 + 64, dtype=np.int64)
        uniq, first = np.unique(batch, return_index=True)
        keep = ~in_S[unrank_many(uniq, n, d)].all(axis=1)
        uniq, first = uniq[keep], first[keep]
        fresh = uniq[np.argsort(first, kind="stable")]
        if acc.size:
            fresh = fresh[~np.isin(fresh, acc)]
        acc = np.concatenate([acc, fresh[:need]])
    return np.sort(acc)


def _rejection_ranks_bigint(rng, n, d, S, m):
    # C(n, d) exceeds int64: exact Python integers, masked-byte rejection
    N = binom(n, d)
    Sset = set(int(v) for v in S)
    bits = N.bit_length()
    nbytes = (bits + 7) // 8
    mask = (1 << bits) - 1
    have = set()
    while len(have) < m:
        v = int.from_bytes(rng.bytes(nbytes), "little") & mask
        if v >= N or v in have:
            continue
        e = unrank_dset(v, n, d)
        if Sset and all(u in Sset for u in e):
            continue
        have.add(v)
    return sorted(have)


def _draw_out_ranks(rng, n, d, S, m):
    """m distinct colex ranks, uniform over d-sets not inside S."""
    if m == 0:
        return np.empty(0, dtype=np.int64)
    N = binom(n, d)
    E = binom(len(S), d)
    eligible = N - E
    if E <= _ENUM_CAP and N < INT64_SAFE:
        if E:
            in_edges = np.array(list(combinations(S, d)), dtype=np.int64)
            excluded = np.sort(np.asarray(rank_many(in_edges, n, d)))
        else:
            excluded = np.empty(0, dtype=np.int64)
        if m == eligible:
            base = np.arange(eligible, dtype=np.int64)
        elif eligible <= _PERM_CAP:
            base = np.sort(rng.permutation(eligible)[:m]).astype(np.int64)
        else:
            base = _distinct_uniform(rng, eligible, m)
        if E:
            # order-preserving bijection from [0, eligible) onto the complement
            shift = np.searchsorted(excluded - np.arange(E), base, side="right")
            return base + shift
        return base
    if N < INT64_SAFE:
        return _rejection_ranks_vec(rng, n, d, S, m)
    return _rejection_ranks_bigint(rng, n, d, S, m)


def sample_hpc(params, seed):
    """One draw of the model: uniform planted S, Bernoulli(p) background elsewhere.

    Deterministic given (params, seed).  RNG consumption order is fixed:
    planted set, then the out-edge count, then the out-edge ranks.
    """
    n, d, k, p = params.n, params.d, params.k, params.p
    N = binom(n, d)
    if p * N > EDGE_RETENTION_CAP:
        raise MemoryCapError(
            f"expected out-edge count p*C(n,d) ~ {p * N:.3g} exceeds cap "
            f"{EDGE_RETENTION_CAP:.3g}; use a smaller n, d, or p"
        )
    rng = rng_from(seed)
    S = np.sort(rng.permutation(n)[:k] + 1)
    m = _binomial_exact(rng, N - binom(k, d), p)
    ranks = _draw_out_ranks(rng, n, d, S.tolist(), m)
    edges = unrank_many(ranks, n, d) if m else np.empty((0, d), dtype=np.int64)
    return HypergraphSample(params, tuple(S.tolist()), edges)


def sample_coupled_pair(params, S, T, seed):
    """Two coupled samples driven by shared uniforms: planted set S and subset T.

    H_e = 1 when e is inside the planted set, else 1{U_e <= p} with one U_e per
    d-set shared by both samples, so the T-sample's edges are a subset of the
    S-sample's.  Requires C(n, d) <= 1e6 (one uniform per d-set).
    """
    n, d, p = params.n, params.d, params.p
    S = tuple(sorted(int(v) for v in S))
    T = tuple(sorted(int(v) for v in T))
    if not set(T) <= set(S):
        raise ValueError("T must be a subset of S")
    N = binom(n, d)
    if N > _BRUTE_CAP:
        raise MemoryCapError(f"coupled sampling materializes C(n,d)={N} uniforms; cap {_BRUTE_CAP}")
    rng = rng_from(seed)
    U = rng.random(N)
    edges = unrank_many(np.arange(N, dtype=np.int64), n, d)
    present = U <= p
    out = {}
    for X in (S, T):
        in_X = np.zeros(n + 1, dtype=bool)
        if X:
            in_X[np.asarray(X, dtype=np.int64)] = True
        inside = in_X[edges].all(axis=1) if len(X) >= d else np.zeros(N, dtype=bool)
        out[X] = edges[present & ~inside]
    pS = ModelParams(n, d, len(S), p)
    pT = ModelParams(n, d, len(T), p)
    return (
        HypergraphSample(pS, S, out[S]),
        HypergraphSample(pT, T, out[T]),
    )


def _pair_counts(edges, n):
    """Symmetric n x n int64 matrix: entry (i,j) counts rows containing both i+1, j+1."""
    A = np.zeros((n, n), dtype=np.int64)
    edges = np.asarray(edges, dtype=np.int64)
    if edges.size == 0:
        return A
    d = edges.shape[1]
    flats = []
    for a in range(d - 1):
        for b in range(a + 1, d):
            flats.append((edges[:, a] - 1) * n + (edges[:, b] - 1))
    upper = np.bincount(np.concatenate(flats), minlength=n * n).reshape(n, n)
    return upper + upper.T


def project(sample):
    """Pairwise co-occurrence counts; the planted family enters in closed form."""
    n, d, k = sample.params.n, sample.params.d, sample.params.k
    A = _pair_counts(sample.out_edges, n)
    if k >= d:
        idx = np.array(sample.S, dtype=np.int64) - 1
        A[np.ix_(idx, idx)] += binom(k - 2, d - 2)
        A[idx, idx] = 0
    return A


def project_bruteforce(sample):
    """Oracle projection: materialize every planted d-set and count pair by pair."""
    n, d, k = sample.params.n, sample.params.d, sample.params.k
    if binom(n, d) > _BRUTE_CAP:
        raise MemoryCapError(f"brute-force projection limited to C(n,d) <= {_BRUTE_CAP}")
    A = np.zeros((n, n), dtype=np.int64)
    edges = []
    if k >= d:
        edges.extend(combinations(sample.S, d))
    edges.extend(tuple(row) for row in sample.out_edges.tolist())
    for e in edges:
        for i, j in combinations(e, 2):
            A[i - 1, j - 1] += 1
            A[j - 1, i - 1] += 1
    return A


def null_mean_offdiag(params):
    """Null expectation of each off-diagonal entry: p * C(n-2, d-2)."""
    return params.p * binom(params.n - 2, params.d - 2)


@dataclass(frozen=True)
class PopulationSummary:
    w_in: float
    w_out: float
    lambda_star: float
    degenerate: bool
    u_star: np.ndarray | None = None


def _planted_pair_count(k, d):
    # planted hyperedges through a fixed pair of S; zero when nothing is planted
    return binom(k - 2, d - 2) if k >= 2 else 0


def population_summary(params, S=None):
    """Population entry means, the planted eigenvalue, and (given S) its eigenvector.

    w_in applies to pairs inside S, w_out elsewhere; lambda_star =
    (w_in - w_out)(k - 1) = (1-p)(k-1) C(k-2, d-2).  Degenerate (k < d) collapses
    to the null: w_in = w_out and lambda_star = 0.
    """
    n, d, k, p = params.n, params.d, params.k, params.p
    base = binom(n - 2, d - 2)
    planted = _planted_pair_count(k, d)
    w_out = p * base
    w_in = planted + p * (base - planted)
    lam = (w_in - w_out) * (k - 1) if k >= 1 else 0.0
    u = None
    if S is not None and k >= 1:
        S = np.asarray(sorted(int(v) for v in S), dtype=np.int64)
        if len(S) != k:
            raise ValueError(f"|S|={len(S)} but k={k}")
        u = np.zeros(n)
        u[S - 1] = 1.0 / np.sqrt(k)
    return PopulationSummary(float(w_in), float(w_out), float(lam), params.degenerate, u)


def population_matrix(params, S):
    """Centered population matrix (w_in - w_out)(1_S 1_S^T - I_S), dense."""
    n, d, k, p = params.n, params.d, params.k, params.p
    S = sorted(int(v) for v in S)
    if len(S) != k:
        raise ValueError(f"|S|={len(S)} but k={k}")
    M = np.zeros((n, n))
    if k >= 2:
        diff = (1 - p) * binom(k - 2, d - 2)
        idx = np.array(S, dtype=np.int64) - 1
        M[np.ix_(idx, idx)] = diff
        M[idx, idx] = 0.0
    return M


# ---------------------------------------------------------------------------
# file formats (byte-stable for fixed input)
#
# hypergraph: line 1 "n d k"; line 2 "S:" + k sorted ids; then one out-edge
# per line, d sorted ids, space-separated.  The background rate p is not part
# of the format; readers supply it.
# matrix: n lines of n comma-separated integers.
# ---------------------------------------------------------------------------


def write_hypergraph(sample, path):
    lines = [f"{sample.params.n} {sample.params.d} {sample.params.k}"]
    lines.append(("S: " + " ".join(str(v) for v in sample.S)).rstrip())
    for row in sample.out_edges.tolist():
        lines.append(" ".join(str(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_hypergraph(path, p=0.0):
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty hypergraph file")
    n, d, k = (int(x) for x in lines[0].split())
    if not lines[1].startswith("S:"):
        raise ValueError(f"{path}: line 2 must start with 'S:'")
    S = tuple(int(v) for v in lines[1][2:].split())
    edges = [[int(v) for v in ln.split()] for ln in lines[2:] if ln.strip()]
    out = np.array(edges, dtype=np.int64).reshape(-1, d)
    return HypergraphSample(ModelParams(n, d, k, p), S, out)


def write_matrix(A, path):
    A = np.asarray(A)
    lines = [",".join(str(int(v)) for v in row) for row in A.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix(path):
    rows = [
        [int(v) for v in ln.split(",")]
        for ln in Path(path).read_text().splitlines()
        if ln.strip()
    ]
    A = np.array(rows, dtype=np.int64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{path}: expected a square matrix, got {A.shape}")
    return A
