"""Symmetric operators and eigensolvers.

Two independent routes to spectra: a matrix-free shifted power iteration
(production path) and a cyclic Jacobi rotation diagonalization (dense oracle,
n <= 400).  Also: centered-operator wrapper A - mu(J - I), the 2->inf norm,
hyperedge co-membership matrices, and leave-one-out splits M = M^(-m) + B^(m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .combinat import binom
from .errors import ConvergenceError
from .model import _pair_counts, null_mean_offdiag, project
from .seeding import mix64, rng_from

_ORACLE_MAX_N = 400


class CenteredOperator:
    """Implicit M = A - mu (J - I): applies M without materializing the centering.

    A must be symmetric with a zero diagonal, so M x = A x - mu (sum(x) 1 - x).
    """

    def __init__(self, A, mu):
        A = np.asarray(A, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got {A.shape}")
        self.A = A
        self.mu = float(mu)
        self.n = A.shape[0]

    @classmethod
    def from_sample(cls, sample):
        return cls(project(sample), null_mean_offdiag(sample.params))

    def matvec(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.A @ x - self.mu * (x.sum() - x)

    def gershgorin(self):
        """max_i sum_j |M_ij| - an upper bound on |lambda| for every eigenvalue."""
        rows = np.abs(self.A - self.mu).sum(axis=1) - np.abs(np.diag(self.A) - self.mu)
        return float(rows.max()) if self.n else 0.0

    def dense(self):
        M = self.A - self.mu
        np.fill_diagonal(M, 0.0)
        return M


class _DenseOp:
    def __init__(self, M):
        M = np.asarray(M, dtype=np.float64)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError(f"operator must be square, got {M.shape}")
        self.M = M
        self.n = M.shape[0]

    def matvec(self, x):
        return self.M @ x

    def gershgorin(self):
        return float(np.abs(self.M).sum(axis=1).max()) if self.n else 0.0


class _NegOp:
    def __init__(self, op):
        self.op = op
        self.n = op.n

    def matvec(self, x):
        return -self.op.matvec(x)

    def gershgorin(self):
        return self.op.gershgorin()


def as_operator(x):
    if isinstance(x, np.ndarray):
        return _DenseOp(x)
    if hasattr(x, "matvec") and hasattr(x, "gershgorin") and hasattr(x, "n"):
        return x
    return _DenseOp(np.asarray(x, dtype=np.float64))


def canonical_sign(v):
    """Flip sign so the largest-|.| entry is positive (ties: lowest index)."""
    v = np.asarray(v, dtype=np.float64)
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray
    residual: float
    iterations: int
    converged: bool


def default_max_iter(n):
    return 50 * math.ceil(math.log2(max(n, 2))) + 1000


def leading_algebraic_eigenpair(op, tol=1e-10, max_iter=None, seed=0):
    """Largest-algebraic eigenpair by power iteration on op + cI, c = Gershgorin bound.

    The shift makes op + cI positive semidefinite, so the dominant eigenvector of
    the shifted operator is the algebraic-top eigenvector of op.  Convergence:
    ||op v - lam v|| <= tol (|lam| + c) with lam the Rayleigh quotient.  On
    non-convergence the last iterate is returned with converged=False.
    """
    op = as_operator(op)
    n = op.n
    if max_iter is None:
        max_iter = default_max_iter(n)
    c = op.gershgorin()
    v = rng_from(seed, 0x65696776).standard_normal(n)
    v /= np.linalg.norm(v)
    lam, res = 0.0, np.inf
    it = 0
    while True:
        w = op.matvec(v)
        lam = float(v @ w)
        res = float(np.linalg.norm(w - lam * v))
        if res <= tol * (abs(lam) + c):
            return EigenPair(lam, canonical_sign(v), res, it, True)
        if it >= max_iter:
            return EigenPair(lam, canonical_sign(v), res, it, False)
        it += 1
        v = w + c * v
        nv = np.linalg.norm(v)
        if nv == 0.0:  # v was an exact eigenvector of -c; residual already 0 above
            raise ConvergenceError("power iteration collapsed to the zero vector")
        v /= nv


def spectral_norm(op, tol=1e-10, max_iter=None, seed=0):
    """||op|| = max(lambda_max, -lambda_min), two shifted power iterations."""
    op = as_operator(op)
    top = leading_algebraic_eigenpair(op, tol, max_iter, mix64(seed, 0x746F70))
    bot = leading_algebraic_eigenpair(_NegOp(op), tol, max_iter, mix64(seed, 0x626F74))
    if not (top.converged and bot.converged):
        raise ConvergenceError(
            f"spectral norm did not converge (residuals {top.residual:.3g}, {bot.residual:.3g})"
        )
    return max(top.value, bot.value)


@njit(cache=True)
def _jacobi_sweeps(A, V, rel_tol, max_sweeps):
    n = A.shape[0]
    norm2 = 0.0
    for i in range(n):
        for j in range(n):
            norm2 += A[i, j] * A[i, j]
    if norm2 == 0.0:
        return 0
    target2 = rel_tol * rel_tol * norm2
    for sweep in range(max_sweeps + 1):
        off2 = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off2 += 2.0 * A[i, j] * A[i, j]
        if off2 <= target2:
            return sweep
        if sweep == max_sweeps:
            return -1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                for i in range(n):
                    aip = A[i, p]
                    aiq = A[i, q]
                    A[i, p] = c * aip - s * aiq
                    A[i, q] = s * aip + c * aiq
                for i in range(n):
                    api = A[p, i]
                    aqi = A[q, i]
                    A[p, i] = c * api - s * aqi
                    A[q, i] = s * api + c * aqi
                A[p, q] = 0.0
                A[q, p] = 0.0
                for i in range(n):
                    vip = V[i, p]
                    viq = V[i, q]
                    V[i, p] = c * vip - s * viq
                    V[i, q] = s * vip + c * viq
    return -1


def dense_eig_oracle(M, rel_tol=1e-12, max_sweeps=60):
    """Full spectrum by cyclic 2x2 rotations; independent of the power iteration.

    Stops once the off-diagonal Frobenius mass is <= rel_tol * ||M||_F.  Returns
    (values desc, columns of matching eigenvectors, each sign-canonicalized).
    Guarded to n <= 400.
    """
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"need a square matrix, got {M.shape}")
    if n > _ORACLE_MAX_N:
        raise ValueError(f"dense oracle limited to n <= {_ORACLE_MAX_N}, got {n}")
    scale = np.abs(M).max() if n else 0.0
    if n and np.abs(M - M.T).max() > 1e-10 * max(1.0, scale):
        raise ValueError("dense oracle requires a symmetric matrix")
    A = 0.5 * (M + M.T)
    V = np.eye(n)
    sweeps = _jacobi_sweeps(A, V, rel_tol, max_sweeps)
    if sweeps < 0:
        raise ConvergenceError(f"Jacobi diagonalization did not settle in {max_sweeps} sweeps")
    vals = np.diag(A).copy()
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    V = V[:, order]
    for j in range(n):
        V[:, j] = canonical_sign(V[:, j])
    return vals, V


def spectral_norm_dense(M):
    """||M|| from the rotation oracle (test/diagnostic path)."""
    vals, _ = dense_eig_oracle(M)
    if len(vals) == 0:
        return 0.0
    return float(max(abs(vals[0]), abs(vals[-1])))


def two_to_inf_norm(M):
    """Largest row 2-norm."""
    M = np.asarray(M, dtype=np.float64)
    if M.size == 0:
        return 0.0
    return float(np.sqrt((M * M).sum(axis=1)).max())


def edge_comembership_matrix(e, n):
    """B_e: (B_e)_ij = 1 iff i != j and both lie in the hyperedge e."""
    B = np.zeros((n, n))
    idx = np.asarray(sorted(int(v) for v in e), dtype=np.int64) - 1
    B[np.ix_(idx, idx)] = 1.0
    B[idx, idx] = 0.0
    return B


@dataclass(frozen=True)
class LeaveOneOut:
    vertex: int
    M_minus: np.ndarray   # centered matrix of hyperedges avoiding the vertex
    B: np.ndarray         # M - M_minus, assembled independently as P + W
    P: np.ndarray         # planted hyperedges through the vertex, weight (1 - p)
    W: np.ndarray         # background hyperedges through the vertex, centered


def leave_one_out(sample, m):
    """Split M into the part blind to vertex m and the incident remainder.

    M_minus is assembled directly from hyperedges avoiding m (with their share
    of the centering), so its m-th row and column vanish.  B is assembled from
    hyperedges through m: P sums the planted ones with weight (1 - p), W the
    centered background ones.  M = M_minus + B holds entrywise; the two sides
    are built along different routes so tests can compare them.
    """
    pr = sample.params
    n, d, k, p = pr.n, pr.d, pr.k, pr.p
    m = int(m)
    if not 1 <= m <= n:
        raise ValueError(f"vertex {m} outside [1, {n}]")
    mm = m - 1
    S = np.asarray(sample.S, dtype=np.int64)
    m_in_S = bool(k and (S == m).any())
    planted = k >= d

    pair_all = binom(n - 2, d - 2)      # d-sets through a fixed pair
    pair_all_m = binom(n - 3, d - 3)    # ... that also contain m
    pk2 = binom(k - 2, d - 2) if planted else 0
    pk3 = binom(k - 3, d - 3) if (planted and m_in_S) else 0

    edges = sample.out_edges
    has_m = (edges == m).any(axis=1) if edges.size else np.zeros(0, dtype=bool)
    cnt_all = _pair_counts(edges, n)
    cnt_m = _pair_counts(edges[has_m], n)

    # --- route 1: M_minus from hyperedges avoiding m
    present_wo = (cnt_all - cnt_m).astype(np.float64)
    if planted:
        idxS = S - 1
        present_wo[np.ix_(idxS, idxS)] += pk2 - pk3
    M_minus = present_wo - p * (pair_all - pair_all_m)
    np.fill_diagonal(M_minus, 0.0)
    M_minus[mm, :] = 0.0
    M_minus[:, mm] = 0.0

    # --- route 2: B = P + W from hyperedges through m
    P = np.zeros((n, n))
    if planted and m_in_S:
        idxS0 = (S - 1)[S != m]
        P[np.ix_(idxS0, idxS0)] = (1 - p) * pk3
        P[idxS0, idxS0] = 0.0
        P[mm, idxS0] = (1 - p) * pk2
        P[idxS0, mm] = (1 - p) * pk2

    all_m = np.full((n, n), float(pair_all_m))
    all_m[mm, :] = pair_all
    all_m[:, mm] = pair_all
    planted_m = np.zeros((n, n))
    if planted and m_in_S:
        idxS0 = (S - 1)[S != m]
        planted_m[np.ix_(idxS0, idxS0)] = pk3
        planted_m[mm, idxS0] = pk2
        planted_m[idxS0, mm] = pk2
    W = cnt_m.astype(np.float64) - p * (all_m - planted_m)
    np.fill_diagonal(W, 0.0)

    return LeaveOneOut(m, M_minus, P + W, P, W)
