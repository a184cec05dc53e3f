"""Shared independent oracles for the test suite.

These deliberately avoid the library's own eigensolver path: spectral
norms are cross-checked by power iteration on the squared matrix, and
exact values are certified by exhibiting an eigenvector (residual check)
together with a row-sum upper bound.
"""

import numpy as np


def power_norm(a: np.ndarray, iters: int = 300, seed: int = 7) -> float:
    """Spectral norm of a symmetric matrix via power iteration on a @ a.

    Squaring makes the dominant eigenvalue unique in magnitude even for
    bipartite weight graphs whose spectrum is symmetric about zero.
    """
    a = np.asarray(a, dtype=float)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(a.shape[0])
    v /= np.linalg.norm(v)
    lam_sq = 0.0
    for _ in range(iters):
        w = a @ (a @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        lam_sq = float(v @ (a @ (a @ v)))
    return float(np.sqrt(lam_sq))


def row_sum_bound(a: np.ndarray) -> float:
    """Max absolute row sum; always an upper bound on the spectral norm."""
    return float(np.max(np.sum(np.abs(a), axis=1)))


def eigen_residual(a: np.ndarray, vec: np.ndarray, mu: float) -> float:
    """||a v - mu v|| for a claimed eigenpair."""
    vec = np.asarray(vec, dtype=float)
    return float(np.linalg.norm(a @ vec - mu * vec))


def certified_norm_equals(a: np.ndarray, mu: float, vec: np.ndarray, tol: float = 1e-9) -> bool:
    """True when mu is an eigenvalue (residual) and also the row-sum cap.

    Exhibiting an eigenvector proves lambda >= mu; the row-sum bound
    proves lambda <= row_sum; together with row_sum == mu this pins
    lambda = mu without any eigensolver.
    """
    return (
        eigen_residual(a, vec, mu) <= tol * max(1.0, abs(mu))
        and abs(row_sum_bound(a) - mu) <= tol * max(1.0, abs(mu))
    )
