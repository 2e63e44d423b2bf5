"""Spectral-norm detection of a planted clique from the co-occurrence matrix.

The test rejects the null when ||A - E_0[A]|| exceeds C sqrt(n C(n-2,d-2) p).
Also here: the quadratic-form statistic along both of its computation routes,
the planted signal term, Bernstein deviation radii for the statistic,
Monte-Carlo calibration of the constant C, and risk estimation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .combinat import binom, sum_ce_all_closed_form
from .model import (
    ModelParams,
    null_mean_offdiag,
    sample_coupled_pair,
    sample_hpc,
)
from .seeding import mix64, ordered_map
from .spectral import CenteredOperator, as_operator, spectral_norm


@dataclass(frozen=True)
class DetectionConfig:
    params: ModelParams
    C: float = 1.0
    alpha: float = 0.05
    tol: float = 1e-7
    max_iter: int = 200_000

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError(f"need C > 0, got {self.C}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"need 0 < alpha < 1, got {self.alpha}")
        if self.tol <= 0:
            raise ValueError(f"need tol > 0, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"need max_iter >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class DetectionOutcome:
    statistic: float
    threshold: float
    reject: bool


def threshold(n, d, p, C):
    """Test cutoff C sqrt(n C(n-2, d-2) p)."""
    if C <= 0:
        raise ValueError(f"need C > 0, got {C}")
    return C * math.sqrt(n * binom(n - 2, d - 2) * p)


def k0_formula(n, d, p, C):
    """Planted-size scale (2C)^{1/(d-1)} (p/(1-p)^2)^{1/(2(d-1))} sqrt(n) above
    which the threshold test has vanishing risk; real-valued."""
    if not 0 < p < 1:
        raise ValueError(f"need 0 < p < 1, got {p}")
    if C <= 0:
        raise ValueError(f"need C > 0, got {C}")
    expo = 1.0 / (d - 1)
    return (2 * C) ** expo * (p / (1 - p) ** 2) ** (expo / 2) * math.sqrt(n)


def k0_integer_form(n, d, p, C):
    """Integer variant floor(kappa sqrt(n)) + 1, kappa = (2C sqrt((d-2)!) sqrt(p)/(1-p))^{1/(d-1)}.

    A companion to k0_formula with different constants; the two are not meant
    to coincide.
    """
    if not 0 < p < 1:
        raise ValueError(f"need 0 < p < 1, got {p}")
    kappa = (2 * C * math.sqrt(math.factorial(d - 2)) * math.sqrt(p) / (1 - p)) ** (
        1.0 / (d - 1)
    )
    return int(math.floor(kappa * math.sqrt(n))) + 1


def run_test(A, cfg, seed=0):
    """Center A under the null mean, take the spectral norm, compare to the cutoff.

    Solver non-convergence raises; it is never silently accepted.
    """
    params = cfg.params
    A = np.asarray(A)
    if A.shape != (params.n, params.n):
        raise ValueError(f"A has shape {A.shape}, params say n={params.n}")
    op = CenteredOperator(A, null_mean_offdiag(params))
    stat = spectral_norm(op, cfg.tol, cfg.max_iter, seed)
    thr = threshold(params.n, params.d, params.p, cfg.C)
    return DetectionOutcome(float(stat), float(thr), bool(stat > thr))


def quadratic_form_stat(M, T):
    """(1/|T|) sum_{i,j in T} M_ij; M may be dense or an operator."""
    T = sorted({int(v) for v in T})
    if not T:
        raise ValueError("T must be nonempty")
    idx = np.asarray(T, dtype=np.int64) - 1
    if isinstance(M, np.ndarray):
        return float(M[np.ix_(idx, idx)].sum() / len(T))
    op = as_operator(M)
    x = np.zeros(op.n)
    x[idx] = 1.0 / math.sqrt(len(T))
    return float(x @ op.matvec(x))


def quadratic_form_hyperedge(sample, T):
    """The same statistic assembled from the hyperedge list:
    (1/|T|) sum_e c_e(T) (H_e - p), with the planted and all-e sums in closed form."""
    pr = sample.params
    n, d, k, p = pr.n, pr.d, pr.k, pr.p
    Tset = sorted({int(v) for v in T})
    k0 = len(Tset)
    if k0 == 0:
        raise ValueError("T must be nonempty")
    r = len(set(Tset) & set(sample.S))
    pair_in = binom(k - 2, d - 2) if k >= 2 else 0
    c_in = r * (r - 1) * pair_in if k >= d else 0
    in_T = np.zeros(n + 1, dtype=bool)
    in_T[np.asarray(Tset, dtype=np.int64)] = True
    if sample.out_edges.size:
        re = in_T[sample.out_edges].sum(axis=1)
        c_pres = int((re * (re - 1)).sum())
    else:
        c_pres = 0
    c_all = sum_ce_all_closed_form(n, k0, d)
    return (c_in + c_pres - p * c_all) / k0


def signal_term(n, k0, d, p):
    """Deterministic planted contribution s = (1-p)(k0-1) C(k0-2, d-2); 0 below k0 = d."""
    if not d <= n:
        raise ValueError(f"need d <= n, got d={d}, n={n}")
    if k0 < d:
        return 0.0
    # the two integer closed forms behind s must agree exactly
    assert d * (d - 1) * binom(k0, d) == k0 * (k0 - 1) * binom(k0 - 2, d - 2)
    return (1 - p) * (k0 - 1) * binom(k0 - 2, d - 2)


def quadratic_noise_radius(n, k0, d, p, delta, use_exact_count=False):
    """Bernstein radius for |q - s| at confidence 1 - delta/2:
    (1/k0)(sqrt(2 V l) + (2/3) U l), l = log(4/delta), U = (d-1)(d-2).

    V defaults to the envelope p(1-p) U k0^2 C(n-2, d-2); with
    use_exact_count=True it uses the exact out-edge count sum instead.
    """
    if not 0 < delta < 2:
        raise ValueError(f"need 0 < delta < 2, got {delta}")
    U = (d - 1) * (d - 2)
    if use_exact_count:
        from .combinat import sum_ce_out_closed_form

        V = p * (1 - p) * U * sum_ce_out_closed_form(n, k0, d)
    else:
        V = p * (1 - p) * U * k0 * k0 * binom(n - 2, d - 2)
    ell = math.log(4.0 / delta)
    return (math.sqrt(2 * V * ell) + (2.0 / 3.0) * U * ell) / k0


@dataclass(frozen=True)
class CalibrationResult:
    C: float
    normalized_stats: np.ndarray
    alpha: float


def calibrate_C(params, alpha, reps, seed, tol=1e-7, max_iter=200_000, workers=1):
    """Empirical (1 - alpha) quantile of ||M|| / sqrt(n C(n-2,d-2) p) over null draws.

    The quantile is the order statistic of rank ceil((1 - alpha) reps).
    Replicates use seeds derived from (seed, replicate index) and aggregate in
    replicate order, so the result is worker-count independent.
    """
    if params.p <= 0:
        raise ValueError("calibration needs p > 0")
    if reps < 50:
        raise ValueError(f"need reps >= 50 for a usable quantile, got {reps}")
    if not 0 < alpha < 1:
        raise ValueError(f"need 0 < alpha < 1, got {alpha}")
    null = replace(params, k=0)
    denom = math.sqrt(null.n * binom(null.n - 2, null.d - 2) * null.p)

    def one(i):
        s = sample_hpc(null, mix64(seed, 0x63616C, i))
        op = CenteredOperator.from_sample(s)
        return spectral_norm(op, tol, max_iter, mix64(seed, 0x736F6C, i)) / denom

    stats = np.array(ordered_map(one, range(reps), workers))
    rank = min(math.ceil((1 - alpha) * reps), reps)
    C = float(np.sort(stats)[rank - 1])
    return CalibrationResult(C, stats, alpha)


@dataclass(frozen=True)
class RiskEstimate:
    type1: float
    type2: float
    threshold: float
    null_stats: np.ndarray
    alt_stats: np.ndarray

    @property
    def risk(self):
        return self.type1 + self.type2


def estimate_risk(params, k_alt, C, reps, seed, tol=1e-7, max_iter=200_000, workers=1):
    """Monte-Carlo type-I (k=0 rejections) and type-II (k=k_alt acceptances) rates."""
    if reps < 1:
        raise ValueError("need reps >= 1")
    null = replace(params, k=0)
    alt = replace(params, k=int(k_alt))
    thr = threshold(params.n, params.d, params.p, C)

    def stat(pp, tag):
        def one(i):
            s = sample_hpc(pp, mix64(seed, tag, i))
            op = CenteredOperator.from_sample(s)
            return spectral_norm(op, tol, max_iter, mix64(seed, tag, i, 0x736F6C))

        return np.array(ordered_map(one, range(reps), workers))

    null_stats = stat(null, 0)
    alt_stats = stat(alt, 1)
    type1 = float((null_stats > thr).mean())
    type2 = float((alt_stats <= thr).mean())
    return RiskEstimate(type1, type2, float(thr), null_stats, alt_stats)


def coupled_quadratic_forms(params, S, T, seed):
    """q(H; u_T) for the coupled pair planted on S and on T (T inside S).

    Under the shared-uniform coupling the S-sample dominates edgewise, so its
    statistic is pointwise >= the T-sample's.
    """
    hs, ht = sample_coupled_pair(params, S, T, seed)
    return (
        quadratic_form_hyperedge(hs, T),
        quadratic_form_hyperedge(ht, T),
    )
