"""Top-k spectral recovery of the planted set and its proximity diagnostics.

Recovery takes the leading eigenvector u of M = A - p C(n-2,d-2)(J - I) and
returns the k indices of largest |u_i|.  Diagnostics measure how close u is to
the population eigenvector u* = 1_S/sqrt(k) through the proxy Mu*/lambda*, and
leave-one-out row audits compare perturbation bounds against oracle spectra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .combinat import binom
from .errors import ConvergenceError
from .model import ModelParams, null_mean_offdiag, population_summary
from .spectral import (
    CenteredOperator,
    dense_eig_oracle,
    leading_algebraic_eigenpair,
    leave_one_out,
    spectral_norm_dense,
)

_LOO_MAX_N = 200


@dataclass(frozen=True)
class RecoveryOutcome:
    S_hat: tuple
    eigenvalue: float
    exact: bool | None = None
    overlap: float | None = None


def recovery_scale(n, d, p):
    """Planted-size scale (p/(1-p))^{1/(2(d-1))} sqrt(n) for exact recovery."""
    if not 0 <= p < 1:
        raise ValueError(f"need 0 <= p < 1, got {p}")
    return (p / (1 - p)) ** (1.0 / (2 * (d - 1))) * math.sqrt(n)


def estimate_background_rate(A, d):
    """Plug-in estimate of p: mean off-diagonal count over its null expectation slope.

    Practical mode for unknown p; the recovery analysis assumes p known.
    """
    A = np.asarray(A)
    n = A.shape[0]
    return float(np.triu(A, 1).sum() / (binom(n, 2) * binom(n - 2, d - 2)))


def top_k_by_magnitude(u, k):
    """1-based indices of the k largest |u_i|, ties broken toward lower index."""
    u = np.asarray(u, dtype=np.float64)
    order = np.argsort(-np.abs(u), kind="stable")
    return tuple(sorted(int(i) + 1 for i in order[:k]))


def spectral_recover(A, k, d, p=None, tol=1e-8, max_iter=200_000, seed=0):
    """Leading-eigenvector top-k selection; p=None plugs in the estimated rate.

    Sign-invariant by construction (selection depends on |u_i| only).
    """
    A = np.asarray(A)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}")
    p_used = estimate_background_rate(A, d) if p is None else p
    op = CenteredOperator(A, p_used * binom(n - 2, d - 2))
    pair = leading_algebraic_eigenpair(op, tol, max_iter, seed)
    if not pair.converged:
        raise ConvergenceError(
            f"eigensolver stalled at residual {pair.residual:.3g} after {pair.iterations} iterations"
        )
    return RecoveryOutcome(top_k_by_magnitude(pair.vector, k), float(pair.value))


def evaluate_recovery(outcome, S_true):
    """Attach overlap |S_hat ∩ S|/k and exactness to an outcome."""
    k = len(outcome.S_hat)
    overlap = len(set(outcome.S_hat) & set(int(v) for v in S_true)) / k
    return replace(outcome, exact=bool(overlap == 1.0), overlap=float(overlap))


@dataclass(frozen=True)
class ProxyDiagnostics:
    alpha_n: float   # ||M u*/lambda* - u*||_inf : proxy-to-population gap
    beta_n: float    # ||u - M u*/lambda*||_inf : eigenvector-to-proxy gap
    sep_ok: bool     # alpha_n + beta_n < 1/(2 sqrt(k)) forces exact recovery


def proxy_diagnostics(A, S, d, p, tol=1e-10, max_iter=200_000, seed=0):
    """Entrywise eigenvector diagnostics against the known planted set."""
    A = np.asarray(A)
    n = A.shape[0]
    S = sorted(int(v) for v in S)
    k = len(S)
    params = ModelParams(n, d, k, p)
    summary = population_summary(params, S)
    if summary.lambda_star <= 0:
        raise ValueError("degenerate instance: k < d or p = 1 leaves no planted signal")
    op = CenteredOperator(A, null_mean_offdiag(params))
    pair = leading_algebraic_eigenpair(op, tol, max_iter, seed)
    if not pair.converged:
        raise ConvergenceError("eigensolver did not converge for proxy diagnostics")
    u_star = summary.u_star
    u = pair.vector
    if float(u @ u_star) < 0:
        u = -u
    w = op.matvec(u_star) / summary.lambda_star
    alpha = float(np.max(np.abs(w - u_star)))
    beta = float(np.max(np.abs(u - w)))
    return ProxyDiagnostics(alpha, beta, bool(alpha + beta < 1.0 / (2 * math.sqrt(k))))


def row_bernstein_radius(n, d, p, v):
    """R_n(v) = V_n ||v||_2 + K_n ||v||_inf with
    V_n = sqrt(p(1-p)(d-1) C(n-2,d-2) log n) and K_n = (d-1) log n."""
    ln = math.log(n)
    v = np.asarray(v, dtype=np.float64)
    Vn = math.sqrt(p * (1 - p) * (d - 1) * binom(n - 2, d - 2) * ln)
    Kn = (d - 1) * ln
    return float(Vn * np.linalg.norm(v) + Kn * np.max(np.abs(v)))


@dataclass(frozen=True)
class LooRowDiagnostic:
    vertex: int
    in_S: bool
    B_norm: float
    P_norm: float
    W_norm: float
    Wu_minus_norm: float     # ||W^(m) u^(-m)||_2
    delta_lambda: float      # min_{i>=2} |lambda_i(M^(-m)) - lambda|
    u_gap: float             # ||u - u^(-m)||_2
    Bu_norm: float           # ||B^(m) u||_2
    pm_bound: float          # 2 d lambda* ||u*||_inf
    pm_ok: bool
    dk_ok: bool | None       # residual bound u_gap <= sqrt(2) Bu_norm / delta; None if delta <= 0


def loo_row_diagnostic(sample, m, rel_slack=1e-9):
    """Dense leave-one-out audit at vertex m, all spectra from the rotation oracle."""
    pr = sample.params
    n, d, k = pr.n, pr.d, pr.k
    if n > _LOO_MAX_N:
        raise ValueError(f"leave-one-out diagnostics limited to n <= {_LOO_MAX_N}")
    summary = population_summary(pr, sample.S if k else None)
    loo = leave_one_out(sample, m)
    M = CenteredOperator.from_sample(sample).dense()

    vals, vecs = dense_eig_oracle(M)
    lam, u = float(vals[0]), vecs[:, 0]
    vals_m, vecs_m = dense_eig_oracle(loo.M_minus)
    u_m = vecs_m[:, 0]
    if float(u_m @ u) < 0:
        u_m = -u_m
    delta = float(np.min(np.abs(vals_m[1:] - lam))) if n > 1 else 0.0

    in_S = int(m) in set(sample.S)
    pm_bound = (
        2 * d * summary.lambda_star / math.sqrt(k) if (k >= d and k > 0) else 0.0
    )
    P_norm = spectral_norm_dense(loo.P)
    B_norm = spectral_norm_dense(loo.B)
    W_norm = spectral_norm_dense(loo.W)
    Bu = float(np.linalg.norm(loo.B @ u))
    u_gap = float(np.linalg.norm(u - u_m))
    slack = rel_slack * (1.0 + abs(pm_bound))
    pm_ok = P_norm <= pm_bound + slack if in_S else P_norm == 0.0
    dk_ok = None
    if delta > 0:
        dk_ok = bool(u_gap <= math.sqrt(2) * Bu / delta + rel_slack * (1 + u_gap))
    return LooRowDiagnostic(
        vertex=int(m),
        in_S=bool(in_S),
        B_norm=B_norm,
        P_norm=P_norm,
        W_norm=W_norm,
        Wu_minus_norm=float(np.linalg.norm(loo.W @ u_m)),
        delta_lambda=delta,
        u_gap=u_gap,
        Bu_norm=Bu,
        pm_bound=float(pm_bound),
        pm_ok=bool(pm_ok),
        dk_ok=dk_ok,
    )
