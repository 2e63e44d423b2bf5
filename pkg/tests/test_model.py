"""Sampling, projection, population quantities, and file round-trips."""

import math

import numpy as np
import pytest

from hcl.combinat import binom
from hcl.errors import MemoryCapError
from hcl.model import (
    HypergraphSample,
    ModelParams,
    null_mean_offdiag,
    population_matrix,
    population_summary,
    project,
    project_bruteforce,
    read_hypergraph,
    read_matrix,
    sample_coupled_pair,
    sample_hpc,
    write_hypergraph,
    write_matrix,
)

# two different 4-uniform hypergraphs on 8 vertices with the same projection
COLLIDING_A = [(1, 2, 3, 5), (1, 2, 4, 6), (3, 6, 7, 8), (4, 5, 7, 8)]
COLLIDING_B = [(1, 2, 3, 6), (1, 2, 4, 5), (3, 5, 7, 8), (4, 6, 7, 8)]

COLLISION_MATRIX = np.array([
    [0, 2, 1, 1, 1, 1, 0, 0],
    [2, 0, 1, 1, 1, 1, 0, 0],
    [1, 1, 0, 0, 1, 1, 1, 1],
    [1, 1, 0, 0, 1, 1, 1, 1],
    [1, 1, 1, 1, 0, 0, 1, 1],
    [1, 1, 1, 1, 0, 0, 1, 1],
    [0, 0, 1, 1, 1, 1, 0, 2],
    [0, 0, 1, 1, 1, 1, 2, 0],
], dtype=np.int64)


def null_sample(edges, n, d, p=0.5):
    params = ModelParams(n, d, 0, p)
    return HypergraphSample(params, (), np.array(edges, dtype=np.int64))


def test_projection_collision_fixture():
    """Distinct hypergraphs can project to the same matrix, bit for bit."""
    A1 = project(null_sample(COLLIDING_A, 8, 4))
    A2 = project(null_sample(COLLIDING_B, 8, 4))
    np.testing.assert_array_equal(A1, COLLISION_MATRIX)
    np.testing.assert_array_equal(A2, COLLISION_MATRIX)
    assert A1.dtype == np.int64


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(5, 2, 0, 0.5)   # d < 3
    with pytest.raises(ValueError):
        ModelParams(4, 5, 0, 0.5)   # d > n
    with pytest.raises(ValueError):
        ModelParams(6, 3, 7, 0.5)   # k > n
    with pytest.raises(ValueError):
        ModelParams(6, 3, 3, 1.5)   # p outside [0, 1]
    assert ModelParams(6, 3, 2, 0.5).degenerate
    assert not ModelParams(6, 3, 3, 0.5).degenerate


def test_sample_validate_and_planted_exclusion():
    rng_seeds = range(30)
    for seed in rng_seeds:
        params = ModelParams(11, 3, 5, 0.4)
        s = sample_hpc(params, seed)
        s.validate()
        assert len(s.S) == 5
        S = set(s.S)
        # background list must never contain a planted d-set
        for e in map(tuple, s.out_edges):
            assert not set(e) <= S


def test_degenerate_k_below_d_matches_null():
    # k < d plants nothing: same law, and identical draws seed by seed
    for seed in range(10):
        a = sample_hpc(ModelParams(12, 4, 0, 0.3), seed)
        b = sample_hpc(ModelParams(12, 4, 3, 0.3), seed)
        np.testing.assert_array_equal(a.out_edges, b.out_edges)
        assert b.S != () and len(b.S) == 3


def test_sampler_deterministic():
    params = ModelParams(40, 3, 10, 0.2)
    a = sample_hpc(params, 123)
    b = sample_hpc(params, 123)
    assert a.S == b.S
    np.testing.assert_array_equal(a.out_edges, b.out_edges)
    c = sample_hpc(params, 124)
    assert a.S != c.S or not np.array_equal(a.out_edges, c.out_edges)


def test_sampler_edge_count_mean():
    # mean background count p * (C(n,d) - C(k,d)) = 0.3 * 116 = 34.8 at (10,3,4)
    params = ModelParams(10, 3, 4, 0.3)
    eligible = binom(10, 3) - binom(4, 3)
    assert eligible == 116
    counts = [sample_hpc(params, seed).out_edges.shape[0] for seed in range(200)]
    mean = np.mean(counts)
    se = math.sqrt(eligible * 0.3 * 0.7 / 200)
    assert abs(mean - 34.8) < 3 * se


def test_sampler_uniform_over_eligible_sets():
    # every eligible d-set should appear with frequency ~= p
    params = ModelParams(8, 3, 4, 0.25)
    hits = {}
    reps = 400
    for seed in range(reps):
        s = sample_hpc(params, seed)
        key = s.S
        for e in map(tuple, s.out_edges):
            hits[e] = hits.get(e, 0) + 1
    total_edges = sum(hits.values())
    # C(8,3) - C(4,3) = 52 eligible sets per draw on average
    expected = reps * 0.25 * (binom(8, 3) - binom(4, 3))
    assert abs(total_edges - expected) / expected < 0.1


def test_project_matches_bruteforce():
    rng = np.random.default_rng(5)
    for trial in range(100):
        n = int(rng.integers(6, 13))
        d = int(rng.integers(3, min(n, 5) + 1))
        k = int(rng.integers(0, n + 1))
        p = float(rng.uniform(0.05, 0.8))
        s = sample_hpc(ModelParams(n, d, k, p), 1000 + trial)
        np.testing.assert_array_equal(project(s), project_bruteforce(s))


def test_project_permutation_equivariance():
    rng = np.random.default_rng(9)
    params = ModelParams(12, 3, 5, 0.3)
    for trial in range(20):
        s = sample_hpc(params, trial)
        A = project(s)
        perm = rng.permutation(12)  # perm[old] = new position, 0-based
        S2 = tuple(sorted(int(perm[v - 1]) + 1 for v in s.S))
        edges2 = np.sort(perm[s.out_edges - 1] + 1, axis=1)
        s2 = HypergraphSample(params, S2, edges2.astype(np.int64))
        A2 = project(s2)
        np.testing.assert_array_equal(A2[np.ix_(perm, perm)], A)


def test_projection_entry_cap():
    # every off-diagonal entry is at most C(n-2, d-2); diagonal is zero
    for seed in range(10):
        s = sample_hpc(ModelParams(10, 4, 6, 0.9), seed)
        A = project(s)
        cap = binom(8, 2)
        assert A.max() <= cap
        assert np.all(np.diag(A) == 0)
        np.testing.assert_array_equal(A, A.T)


def test_full_clique_projection_is_exact():
    # k = n, p = 0: A_ij = C(n-2, d-2) off the diagonal, exactly
    params = ModelParams(7, 3, 7, 0.0)
    s = sample_hpc(params, 0)
    assert s.out_edges.shape[0] == 0
    A = project(s)
    want = binom(5, 1) * (np.ones((7, 7), dtype=np.int64) - np.eye(7, dtype=np.int64))
    np.testing.assert_array_equal(A, want)


def test_null_mean_offdiag():
    assert null_mean_offdiag(ModelParams(10, 3, 0, 0.3)) == pytest.approx(0.3 * 8)
    assert null_mean_offdiag(ModelParams(8, 4, 0, 0.5)) == pytest.approx(0.5 * 15)


def test_population_summary_fixture():
    # n=8, d=4, k=5, p=0.5: w_in = 3 + 0.5*(15-3) = 9, w_out = 7.5, lambda* = 6
    summ = population_summary(ModelParams(8, 4, 5, 0.5))
    assert summ.w_in == pytest.approx(9.0)
    assert summ.w_out == pytest.approx(7.5)
    assert summ.lambda_star == pytest.approx(6.0)
    assert not summ.degenerate


def test_population_summary_degenerate():
    summ = population_summary(ModelParams(8, 4, 3, 0.5))
    assert summ.degenerate
    assert summ.lambda_star == 0.0


def test_population_matrix_spectrum():
    # n=6, d=3, k=3, p=0.5: eigenvalues {1, 0, 0, 0, -1/2, -1/2}
    M = population_matrix(ModelParams(6, 3, 3, 0.5), S=(1, 2, 3))
    vals = np.sort(np.linalg.eigvalsh(M))[::-1]
    np.testing.assert_allclose(vals, [1.0, 0, 0, 0, -0.5, -0.5], atol=1e-12)


def test_population_matrix_is_empirical_mean():
    # Monte Carlo average of centered projections converges to M*; the model is
    # exchangeable, so relabel each draw to put its planted set on a fixed S
    params = ModelParams(9, 3, 4, 0.4)
    S = (2, 3, 5, 7)
    mu = null_mean_offdiag(params)
    offdiag = np.ones((9, 9)) - np.eye(9)
    acc = np.zeros((9, 9))
    reps = 3000
    for seed in range(reps):
        s = sample_hpc(params, seed)
        perm = np.empty(9, dtype=np.int64)  # perm[old - 1] = new vertex id
        rest_old = [v for v in range(1, 10) if v not in s.S]
        rest_new = [v for v in range(1, 10) if v not in S]
        for old, new in zip(list(s.S) + rest_old, list(S) + rest_new):
            perm[old - 1] = new
        edges = np.sort(perm[s.out_edges - 1], axis=1) if s.out_edges.size else s.out_edges
        relabeled = HypergraphSample(params, S, edges.astype(np.int64))
        acc += project(relabeled) - mu * offdiag
    avg = acc / reps
    M_star = population_matrix(params, S)
    assert np.abs(avg - M_star).max() < 0.15


def test_hypergraph_file_roundtrip(tmp_path):
    params = ModelParams(15, 4, 6, 0.2)
    s = sample_hpc(params, 77)
    path = tmp_path / "h.txt"
    write_hypergraph(s, path)
    back = read_hypergraph(path, p=0.2)
    assert back.params == params
    assert back.S == s.S
    np.testing.assert_array_equal(back.out_edges, s.out_edges)


def test_matrix_file_roundtrip(tmp_path):
    s = sample_hpc(ModelParams(10, 3, 5, 0.4), 8)
    A = project(s)
    path = tmp_path / "m.txt"
    write_matrix(A, path)
    np.testing.assert_array_equal(read_matrix(path), A)


def test_read_matrix_rejects_ragged(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0,1,2\n1,0\n")
    with pytest.raises(ValueError):
        read_matrix(path)


def test_memory_cap_refusal():
    # p * C(n, d) ~ 2.4e10 expected edges: must refuse up front, not thrash
    params = ModelParams(1000, 8, 0, 0.1)
    with pytest.raises(MemoryCapError):
        sample_hpc(params, 0)


def test_large_sparse_sample_bigint_path():
    # C(1000, 8) >= 2**62 exercises the arbitrary-precision rank path
    params = ModelParams(1000, 8, 40, 1e-16)
    s = sample_hpc(params, 4)
    s.validate()
    assert len(s.S) == 40


def test_coupled_pair_shares_background():
    params = ModelParams(12, 3, 7, 0.4)
    S = (1, 2, 3, 4, 5, 6, 7)
    T = (2, 3, 4, 5)
    for seed in range(20):
        a, b = sample_coupled_pair(params, S, T, seed)
        assert a.S == S and b.S == T
        ea = {tuple(e) for e in a.out_edges}
        eb = {tuple(e) for e in b.out_edges}
        # a excludes everything inside S, b only everything inside T (T subset of S),
        # and both use the same uniforms, so a's background nests inside b's
        assert ea <= eb
        extra = eb - ea
        assert all(set(e) <= set(S) and not set(e) <= set(T) for e in extra)


def test_coupled_pair_requires_nested_sets():
    params = ModelParams(12, 3, 7, 0.4)
    with pytest.raises(ValueError):
        sample_coupled_pair(params, (1, 2, 3, 4, 5, 6, 7), (2, 3, 99), 0)
