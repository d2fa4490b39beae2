"""L1-regularized recovery of node scores from aggregated measurements.

Minimizes  lam * ||x||_1 + ||A x - y||_2^2  with accelerated proximal
gradient (soft-threshold prox) and function-value adaptive restart, which
keeps the accepted objective sequence non-increasing. The step size comes
from a power-method bound on ||A||_2^2 with a 10% safety margin. A is the
binary row-support matrix of a MeasurementSystem and is only touched through
mat-vec kernels, so the solver never materializes it densely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .measure import MeasurementSystem

DEFAULT_LAMBDA = 1.0
DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 100_000
_POWER_ITERS = 50


class RecoveryError(ValueError):
    pass


@dataclass
class RecoveryResult:
    x_hat: np.ndarray
    objective_value: float
    iterations: int
    converged: bool


def _operator_norm_sq(rows_indptr, cols, n, m) -> float:
    """Power-method estimate of ||A||_2^2 = lambda_max(A^T A)."""
    rng = np.random.default_rng(0)
    v = rng.random(n)
    nv = np.linalg.norm(v)
    if nv == 0 or cols.size == 0:
        return 0.0
    v /= nv
    est = 0.0
    for _ in range(_POWER_ITERS):
        w = K.col_scatter(rows_indptr, cols, K.row_sums(rows_indptr, cols, v), n)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        est = nw
        v = w / nw
    return float(est)


def lasso_solve(ms: MeasurementSystem, lam: float = DEFAULT_LAMBDA,
                nonneg: bool = True, tol: float = DEFAULT_TOL,
                max_iter: int = DEFAULT_MAX_ITER) -> RecoveryResult:
    """Solve min_x lam*||x||_1 + ||Ax - y||^2 for the given measurements.

    With `nonneg` the prox additionally projects onto x >= 0. Termination
    requires the relative objective change to drop below `tol` with the KKT
    subgradient residual at most tol * ||A^T y||_inf (so the returned point
    is tol-scale optimal, not merely objective-flat); `max_iter` caps the
    work either way.
    """
    if lam <= 0:
        raise RecoveryError(f"lambda must be positive, got {lam}")
    if ms.num_measurements == 0:
        raise RecoveryError("measurement system has no rows")
    y = np.asarray(ms.y, dtype=np.float64)
    if not np.all(np.isfinite(y)):
        raise RecoveryError("non-finite measurement values")
    n = ms.node_count
    rows_indptr, cols = ms.rows_csr()

    lip = 2.0 * _operator_norm_sq(rows_indptr, cols, n, ms.num_measurements)
    if lip == 0.0:  # A is all-zero: the l1 term alone drives x to 0
        return RecoveryResult(np.zeros(n), float(y @ y), 0, True)
    step = 1.0 / (lip * 1.1)
    scale = float(np.abs(K.col_scatter(rows_indptr, cols, y, n)).max())
    kkt_target = tol * scale
    x, fx, iterations, converged = K.fista(
        rows_indptr, cols, y, n, float(lam), step, bool(nonneg), float(tol),
        float(kkt_target), int(max_iter))
    return RecoveryResult(x_hat=x, objective_value=float(fx),
                          iterations=int(iterations), converged=bool(converged))


def kkt_residual(ms: MeasurementSystem, x: np.ndarray, lam: float,
                 nonneg: bool = False) -> float:
    """Max subgradient violation of lam*||x||_1 + ||Ax - y||^2 at x.

    For x_j != 0 the violation is |2 (A^T(Ax-y))_j + lam*sign(x_j)|; for
    x_j = 0 it is max(0, |2 (A^T(Ax-y))_j| - lam). With `nonneg`, zero
    coordinates only violate when the signed stationarity pushes negative.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (ms.node_count,):
        raise RecoveryError(
            f"x has shape {x.shape}, expected ({ms.node_count},)"
        )
    rows_indptr, cols = ms.rows_csr()
    resid = K.row_sums(rows_indptr, cols, x) - ms.y
    g = 2.0 * K.col_scatter(rows_indptr, cols, resid, ms.node_count)
    viol = np.empty_like(x)
    nz = x != 0
    viol[nz] = np.abs(g[nz] + lam * np.sign(x[nz]))
    if nonneg:
        viol[~nz] = np.maximum(0.0, -(g[~nz] + lam))
    else:
        viol[~nz] = np.maximum(0.0, np.abs(g[~nz]) - lam)
    return float(viol.max()) if viol.size else 0.0


def top_k(scores: np.ndarray, k: int):
    """k largest entries as (node, score) pairs; ties broken by smaller id."""
    scores = np.asarray(scores, dtype=np.float64)
    n = scores.shape[0]
    if not 1 <= k <= n:
        raise RecoveryError(f"k must be in [1, {n}], got {k}")
    order = np.lexsort((np.arange(n), -scores))[:k]
    return [(int(i), float(scores[i])) for i in order]


def top_k_ids(scores: np.ndarray, k: int) -> np.ndarray:
    """Just the ids of top_k, as an int64 array."""
    return np.array([i for i, _ in top_k(scores, k)], dtype=np.int64)
