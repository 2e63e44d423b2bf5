"""Deviation-bound identities and the bundled self-check battery."""

import math

import numpy as np
import pytest

from hcl.combinat import binom
from hcl.diagnostics import (
    BernsteinParams,
    bernstein_excess,
    bernstein_t,
    check_cauchy_schwarz_row,
    check_single_edge_bound,
    check_sum_ae2,
    check_vector_radius,
    check_weyl,
    concentration_trend,
    run_selftest,
    vector_bernstein_radius,
)


def test_bernstein_t_fixture():
    # V=2, U=3, l=1: t = sqrt(2*2*1) + (2/3)*3*1 = 4
    bp = BernsteinParams(2.0, 3.0, 1.0)
    assert bernstein_t(bp) == pytest.approx(4.0, rel=1e-12)


def test_bernstein_excess_identity():
    # t^2 - l (2V + (2/3) U t) == (2/3) U l sqrt(2 V l), exactly in exact arithmetic
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        V = float(rng.uniform(0.01, 50))
        U = float(rng.uniform(0.01, 20))
        ell = float(rng.uniform(0.01, 10))
        bp = BernsteinParams(V, U, ell)
        t = bernstein_t(bp)
        lhs = t * t - ell * (2 * V + (2 / 3) * U * t)
        rhs = (2 / 3) * U * ell * math.sqrt(2 * V * ell)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)
        assert bernstein_excess(bp) == pytest.approx(rhs, rel=1e-12)


def test_bernstein_excess_boundary():
    assert bernstein_excess(BernsteinParams(2.0, 3.0, 1.0)) == pytest.approx(4.0)


def test_bernstein_params_validation():
    with pytest.raises(ValueError):
        BernsteinParams(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        BernsteinParams(1.0, 1.0, 0.0)


def test_check_weyl():
    rng = np.random.default_rng(3)
    for _ in range(50):
        A = rng.standard_normal((20, 20))
        A = (A + A.T) / 2
        B = rng.standard_normal((20, 20))
        B = (B + B.T) / 2
        ok, gap, norm = check_weyl(A, B)
        assert ok
        assert gap <= norm + 1e-9


def test_check_cauchy_schwarz_row():
    rng = np.random.default_rng(4)
    M = rng.standard_normal((15, 15))
    v = rng.standard_normal(15)
    ok, worst, bound = check_cauchy_schwarz_row(M, v)
    assert ok
    # the bound is tight when v aligns with a row
    M2 = np.zeros((3, 3))
    M2[0] = [3.0, 4.0, 0.0]
    ok2, worst2, bound2 = check_cauchy_schwarz_row(M2, np.array([3.0, 4.0, 0.0]) / 5)
    assert ok2
    assert worst2 == pytest.approx(5.0)
    assert bound2 == pytest.approx(5.0)


def test_check_single_edge_bound():
    # ||B_e v|| <= (d-1) sqrt(sum_{j in e} v_j^2) for any d-set co-membership matrix
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = 30
        d = int(rng.integers(3, 7))
        e = tuple(sorted(rng.choice(np.arange(1, n + 1), d, replace=False).tolist()))
        v = rng.standard_normal(n)
        ok, lhs, rhs = check_single_edge_bound(e, v, n)
        assert ok
        restricted = math.sqrt(sum(v[j - 1] ** 2 for j in e))
        assert rhs == pytest.approx((d - 1) * restricted, rel=1e-12)
    # equality when v is the indicator of e: both sides are (d-1) sqrt(d)
    e = (1, 2, 3)
    v = np.zeros(10)
    v[:3] = 1.0
    ok, lhs, rhs = check_single_edge_bound(e, v, 10)
    assert ok
    assert lhs == pytest.approx(2 * math.sqrt(3))
    assert rhs == pytest.approx(2 * math.sqrt(3))


def test_check_sum_ae2_fixture():
    # all-ones vector, n=6, d=3, row 1: sum_e (row-sum over e without i)^2 = 40,
    # bound (d-1) C(n-2, d-2) ||v||^2 = 2 * 4 * 6 = 48
    v = np.ones(6)
    ok, lhs, rhs = check_sum_ae2(6, 3, 1, v)
    assert ok
    assert lhs == pytest.approx(40.0)
    assert rhs == pytest.approx(48.0)


def test_check_sum_ae2_random():
    rng = np.random.default_rng(6)
    for _ in range(50):
        n = int(rng.integers(6, 12))
        d = int(rng.integers(3, 5))
        i = int(rng.integers(1, n + 1))
        v = rng.standard_normal(n)
        ok, lhs, rhs = check_sum_ae2(n, d, i, v)
        assert ok, (n, d, i)


def test_vector_bernstein_radius_formula():
    n, d, p = 80, 3, 0.4
    want = (26 / 3) * (d - 1) * (
        math.sqrt(p * (1 - p) * binom(n - 2, d - 2) * math.log(n)) + math.log(n))
    assert vector_bernstein_radius(n, d, p) == pytest.approx(want, rel=1e-12)


def test_check_vector_radius_no_violations():
    # ||W u^(-m)|| stays inside L_n across every vertex of every draw
    rep = check_vector_radius(n=40, d=3, p=0.3, k=12, reps=20, seed=9)
    assert rep.total == 20 * 40
    assert rep.violations == 0
    assert rep.max_norm <= rep.radius


def test_concentration_trend_bounded_ratio():
    # ||M|| / sqrt(n C(n-2,d-2) p) under the null: the max over draws stays
    # within a constant band as n doubles
    trend = concentration_trend([30, 60], 3, 0.3, reps=20, seed=10)
    vals = list(trend.values())
    assert len(vals) == 2
    assert max(vals) / min(vals) < 1.5
    assert all(0.5 < v < 10 for v in vals)


def test_run_selftest_quick_all_pass(tmp_path):
    results = run_selftest(seed=123, out_dir=tmp_path, quick=True)
    assert all(r.status in ("pass", "trend") for r in results)
    assert (tmp_path / "selftest.txt").exists()
    assert (tmp_path / "selftest.csv").exists()
    text = (tmp_path / "selftest.txt").read_text()
    assert "bernstein" in text
    csv = (tmp_path / "selftest.csv").read_text().strip().splitlines()
    assert csv[0] == "name,status,detail"
    assert len(csv) == len(results) + 1
