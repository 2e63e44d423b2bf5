"""Finite-size checks of every inequality the analysis leans on.

Hard checks (violations are bugs): the Bernstein parameter identity, Weyl's
eigenvalue perturbation bound, row Cauchy-Schwarz against the 2->inf norm, the
single-hyperedge operator bound, the row variance envelope sum_e a_e^2, and the
vector Bernstein radius event.  Trend reports (no pass/fail): spectral-norm
concentration ratios across n.  run_selftest bundles the battery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .combinat import binom
from .errors import MemoryCapError
from .model import ModelParams, population_matrix, project, project_bruteforce, sample_hpc
from .seeding import mix64, ordered_map, rng_from
from .spectral import (
    CenteredOperator,
    dense_eig_oracle,
    edge_comembership_matrix,
    leading_algebraic_eigenpair,
    leave_one_out,
    spectral_norm,
    spectral_norm_dense,
    two_to_inf_norm,
)


@dataclass(frozen=True)
class BernsteinParams:
    V: float   # variance term
    U: float   # envelope (almost-sure bound)
    ell: float # log(1/confidence) factor

    def __post_init__(self):
        if self.V < 0 or self.U < 0 or self.ell <= 0:
            raise ValueError(f"need V, U >= 0 and ell > 0, got {self}")


def bernstein_t(bp):
    """Deviation level t = sqrt(2 V ell) + (2/3) U ell."""
    return math.sqrt(2 * bp.V * bp.ell) + (2.0 / 3.0) * bp.U * bp.ell


def bernstein_excess(bp):
    """t^2 - ell (2V + (2/3) U t), evaluated directly; equals (2/3) U ell sqrt(2 V ell).

    Nonnegative for every admissible triple: the chosen t always clears the
    Bernstein tail condition.
    """
    t = bernstein_t(bp)
    return t * t - bp.ell * (2 * bp.V + (2.0 / 3.0) * bp.U * t)


def check_weyl(A, B, rel_slack=1e-9):
    """max_i |lambda_i(A) - lambda_i(B)| <= ||A - B|| (oracle spectra, sorted)."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    va, _ = dense_eig_oracle(A)
    vb, _ = dense_eig_oracle(B)
    gap = float(np.max(np.abs(va - vb))) if len(va) else 0.0
    norm = spectral_norm_dense(A - B)
    return gap <= norm + rel_slack * (1.0 + norm), gap, norm


def check_cauchy_schwarz_row(M, v, rel_slack=1e-9):
    """Every |M_{i:} v| <= ||M||_{2->inf} ||v||_2."""
    M = np.asarray(M, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    lhs = np.abs(M @ v)
    rhs = two_to_inf_norm(M) * float(np.linalg.norm(v))
    return bool((lhs <= rhs + rel_slack * (1.0 + rhs)).all()), float(lhs.max()), rhs


def check_single_edge_bound(e, v, n, rel_slack=1e-9):
    """||B_e v||_2 <= (d-1) sqrt(sum_{j in e} v_j^2)."""
    v = np.asarray(v, dtype=np.float64)
    e = sorted(int(x) for x in e)
    d = len(e)
    B = edge_comembership_matrix(e, n)
    lhs = float(np.linalg.norm(B @ v))
    rhs = (d - 1) * math.sqrt(sum(v[j - 1] ** 2 for j in e))
    return lhs <= rhs + rel_slack * (1.0 + rhs), lhs, rhs


def check_sum_ae2(n, d, i, v, rel_slack=1e-9):
    """sum over d-sets e containing i of (sum_{j in e, j != i} v_j)^2
    <= (d-1) C(n-2, d-2) ||v||_2^2, by brute-force enumeration."""
    if binom(n, d) > 10**6:
        raise MemoryCapError("check_sum_ae2 enumerates all d-sets; C(n,d) too large")
    i = int(i)
    v = np.asarray(v, dtype=np.float64)
    lhs = 0.0
    others = [x for x in range(1, n + 1) if x != i]
    for rest in combinations(others, d - 1):
        a = sum(v[j - 1] for j in rest)
        lhs += a * a
    rhs = (d - 1) * binom(n - 2, d - 2) * float(v @ v)
    return lhs <= rhs + rel_slack * (1.0 + rhs), lhs, rhs


def vector_bernstein_radius(n, d, p):
    """L_n = (26/3)(d-1) (sqrt(p(1-p) C(n-2,d-2) log n) + log n)."""
    ln = math.log(n)
    return (26.0 / 3.0) * (d - 1) * (math.sqrt(p * (1 - p) * binom(n - 2, d - 2) * ln) + ln)


@dataclass(frozen=True)
class VectorRadiusReport:
    violations: int
    total: int
    radius: float
    max_norm: float


def check_vector_radius(n, d, p, k, reps, seed, tol=1e-8, max_iter=200_000, workers=1):
    """Count ||W^(m) u^(-m)||_2 > L_n over replicates and every vertex m.

    u^(-m) is the leading eigenvector of M^(-m); violations are expected to be
    zero at the sizes used in the suite.
    """
    params = ModelParams(n, d, k, p)
    radius = vector_bernstein_radius(n, d, p)

    def one(i):
        s = sample_hpc(params, mix64(seed, 0x766563, i))
        worst = 0.0
        for m in range(1, n + 1):
            loo = leave_one_out(s, m)
            pair = leading_algebraic_eigenpair(
                loo.M_minus, tol, max_iter, mix64(seed, i, m)
            )
            worst = max(worst, float(np.linalg.norm(loo.W @ pair.vector)))
        return worst

    worsts = ordered_map(one, range(reps), workers)
    violations = sum(1 for w in worsts if w > radius)
    return VectorRadiusReport(violations, reps * n, radius, max(worsts) if worsts else 0.0)


def concentration_trend(n_values, d, p, reps, seed, k=0, tol=1e-7, max_iter=200_000, workers=1):
    """Per-size max of ||M - M*|| / sqrt(n C(n-2,d-2) p) over replicates.

    Reported as a trend (the analysis says the ratio stays bounded in n); not a
    pass/fail check on its own.
    """
    out = {}
    for n in n_values:
        params = ModelParams(n, d, k, p)
        denom = math.sqrt(n * binom(n - 2, d - 2) * p)

        def one(i, n=n, params=params, denom=denom):
            s = sample_hpc(params, mix64(seed, n, i))
            op = CenteredOperator.from_sample(s)
            if k:
                M = op.dense() - population_matrix(params, s.S)
                val = spectral_norm(M, tol, max_iter, mix64(seed, n, i, 1))
            else:
                val = spectral_norm(op, tol, max_iter, mix64(seed, n, i, 1))
            return val / denom

        ratios = ordered_map(one, range(reps), workers)
        out[n] = float(max(ratios))
    return out


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str   # pass | fail | trend
    detail: str


def _result(rows, name, ok, detail):
    rows.append(CheckResult(name, "pass" if ok else "fail", detail))


def run_selftest(seed=20260825, out_dir=None, quick=False):
    """Run the whole diagnostic battery; returns the report rows.

    Hard rows are pass/fail; trend rows are informational.  When out_dir is
    given, writes selftest.txt and selftest.csv there.
    """
    rows = []
    rng = rng_from(seed, 0x73656C66)

    # Bernstein parameter identity over a grid
    worst = 0.0
    for V in np.linspace(0.0, 9.0, 10):
        for U in np.linspace(0.0, 9.0, 10):
            for ell in np.linspace(0.1, 12.0, 100):
                bp = BernsteinParams(float(V), float(U), float(ell))
                direct = bernstein_excess(bp)
                closed = (2.0 / 3.0) * U * ell * math.sqrt(2 * V * ell)
                scale = max(1.0, abs(closed))
                worst = max(worst, abs(direct - closed) / scale)
    _result(rows, "bernstein-excess-identity", worst <= 1e-12,
            f"max relative gap {worst:.3g} over 10000 triples")

    bp = BernsteinParams(2.0, 3.0, 1.0)
    _result(rows, "bernstein-boundary", abs(bernstein_t(bp) - 4.0) < 1e-15
            and abs(bernstein_excess(bp) - 4.0) < 1e-12,
            f"t={bernstein_t(bp)}, excess={bernstein_excess(bp)}")

    # Weyl on random pairs
    ok_all = True
    worst = 0.0
    for _ in range(20 if quick else 100):
        n = 30
        X = rng.standard_normal((n, n))
        A = 0.5 * (X + X.T)
        Y = rng.standard_normal((n, n))
        B = A + 0.05 * 0.5 * (Y + Y.T)
        ok, gap, norm = check_weyl(A, B)
        ok_all &= ok
        worst = max(worst, gap - norm)
    _result(rows, "weyl-perturbation", ok_all, f"max(gap - norm) = {worst:.3g}")

    # Cauchy-Schwarz rows
    ok_all = True
    for _ in range(20 if quick else 100):
        M = rng.standard_normal((25, 25))
        v = rng.standard_normal(25)
        ok, _, _ = check_cauchy_schwarz_row(M, v)
        ok_all &= ok
    _result(rows, "cauchy-schwarz-rows", ok_all, "random 25x25 matrices")

    # single-hyperedge operator bound
    ok_all = True
    n = 30
    for _ in range(20 if quick else 100):
        d = int(rng.integers(3, 7))
        e = np.sort(rng.permutation(n)[:d] + 1)
        v = rng.standard_normal(n)
        ok, _, _ = check_single_edge_bound(e, v, n)
        ok_all &= ok
    _result(rows, "single-hyperedge-bound", ok_all, "random (e, v), n=30")

    # row variance envelope
    ok_all = True
    ok, lhs, rhs = check_sum_ae2(6, 3, 1, np.ones(6))
    ok_all &= ok and abs(lhs - 40.0) < 1e-12 and abs(rhs - 48.0) < 1e-12
    for _ in range(10 if quick else 50):
        n = int(rng.integers(5, 11))
        d = int(rng.integers(3, min(n, 5) + 1))
        i = int(rng.integers(1, n + 1))
        v = rng.standard_normal(n)
        ok, _, _ = check_sum_ae2(n, d, i, v)
        ok_all &= ok
    _result(rows, "row-variance-envelope", ok_all, "all-ones fixture 40<=48 plus random draws")

    # projection equality spot checks
    ok_all = True
    for t in range(5 if quick else 20):
        n = int(rng.integers(8, 13))
        d = int(rng.integers(3, 6))
        k = int(rng.integers(0, n + 1))
        params = ModelParams(n, d, k, float(rng.uniform(0.1, 0.9)))
        s = sample_hpc(params, mix64(seed, 0x70726F6A, t))
        ok_all &= bool((project(s) == project_bruteforce(s)).all())
    _result(rows, "projection-vs-bruteforce", ok_all, "random samples, n<=12")

    # quadratic form identity spot checks
    from .detect import quadratic_form_hyperedge, quadratic_form_stat
    from .model import null_mean_offdiag

    ok_all = True
    worst = 0.0
    for t in range(5 if quick else 20):
        n = int(rng.integers(10, 20))
        d = 3 if rng.random() < 0.5 else 4
        k = int(rng.integers(d, n + 1))
        params = ModelParams(n, d, k, 0.4)
        s = sample_hpc(params, mix64(seed, 0x71666F72, t))
        k0 = int(rng.integers(1, n + 1))
        T = np.sort(rng.permutation(n)[:k0] + 1).tolist()
        M = CenteredOperator.from_sample(s).dense()
        qm = quadratic_form_stat(M, T)
        qh = quadratic_form_hyperedge(s, T)
        gap = abs(qm - qh) / max(1.0, abs(qh))
        worst = max(worst, gap)
        ok_all &= gap <= 1e-9
    _result(rows, "quadratic-form-two-routes", ok_all, f"max relative gap {worst:.3g}")

    # coupling monotonicity spot checks
    from .detect import coupled_quadratic_forms

    ok_all = True
    for t in range(10 if quick else 50):
        n, d, p = 15, 3, 0.4
        k, k0 = 8, 5
        params = ModelParams(n, d, k, p)
        S = np.sort(rng.permutation(n)[:k] + 1).tolist()
        T = sorted(int(v) for v in np.asarray(S)[np.sort(rng.permutation(k)[:k0])])
        qS, qT = coupled_quadratic_forms(params, S, T, mix64(seed, 0x637570, t))
        ok_all &= qS >= qT - 1e-12
    _result(rows, "coupling-monotone", ok_all, "q(S-sample) >= q(T-sample) on shared uniforms")

    # vector Bernstein radius event
    rep = check_vector_radius(40 if quick else 60, 3, 0.3, 12 if quick else 20,
                              10 if quick else 50, mix64(seed, 0x7261))
    _result(rows, "vector-radius-event", rep.violations == 0,
            f"{rep.violations}/{rep.total} exceed L_n={rep.radius:.4g} (max {rep.max_norm:.4g})")

    # concentration ratio trend (informational)
    trend = concentration_trend([30, 60, 120] if quick else [40, 80, 160], 3, 0.5,
                                10 if quick else 30, mix64(seed, 0x7472))
    ratios = ", ".join(f"n={n}: {r:.4g}" for n, r in trend.items())
    vals = list(trend.values())
    spread = max(vals) / min(vals)
    rows.append(CheckResult("concentration-ratio-trend", "trend",
                            f"{ratios}; max/min spread {spread:.3g}"))

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        txt = [f"[{r.status.upper():5s}] {r.name}: {r.detail}" for r in rows]
        fails = sum(r.status == "fail" for r in rows)
        txt.append(f"-- {len(rows)} checks, {fails} failures")
        (out / "selftest.txt").write_text("\n".join(txt) + "\n")
        csv = ["name,status,detail"]
        for r in rows:
            detail = r.detail.replace('"', "'")
            csv.append(f'{r.name},{r.status},"{detail}"')
        (out / "selftest.csv").write_text("\n".join(csv) + "\n")
    return rows
