"""Small dense symmetric-positive-definite matrix kernel.

All component scale matrices in the multivariate engine are tiny (d <= 64,
and d <= 10 in every experiment), so the kernel favours clarity over
blocking: dense row-major arrays, explicit symmetrization on construction,
and a Cholesky that reports the offending pivot when positive definiteness
fails so the caller can jitter or prune the component.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

__all__ = [
    "NotPositiveDefinite",
    "as_spd",
    "cholesky",
    "spd_inverse_logdet",
    "spd_inverse_logdet_jittered",
    "quad_form",
    "trace_product",
]


class NotPositiveDefinite(Exception):
    """Raised when a Cholesky pivot is not strictly positive.

    Recoverable by design: fitting code adds jitter and retries once, then
    prunes the component.
    """

    def __init__(self, pivot_index: int):
        self.pivot_index = pivot_index
        super().__init__(f"pivot {pivot_index} is not positive")


def as_spd(m, rtol: float = 1e-12) -> np.ndarray:
    """Validate symmetry and return the symmetrized copy (m + m.T) / 2."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(np.abs(m).max(), 1.0)
    if np.abs(m - m.T).max() > rtol * scale * m.shape[0]:
        raise ValueError("matrix is not symmetric")
    return 0.5 * (m + m.T)


def cholesky(m) -> np.ndarray:
    """Lower-triangular L with L @ L.T = m.

    Raises
    ------
    NotPositiveDefinite
        With the index of the first non-positive pivot.
    """
    m = np.asarray(m, dtype=float)
    d = m.shape[0]
    L = np.zeros_like(m)
    for j in range(d):
        pivot = m[j, j] - L[j, :j] @ L[j, :j]
        if not pivot > 0.0:
            raise NotPositiveDefinite(j)
        L[j, j] = np.sqrt(pivot)
        if j + 1 < d:
            L[j + 1 :, j] = (m[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def spd_inverse_logdet(m) -> tuple[np.ndarray, float]:
    """Inverse and log-determinant of an SPD matrix via Cholesky."""
    m = np.asarray(m, dtype=float)
    L = cholesky(m)
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    eye = np.eye(m.shape[0])
    linv = solve_triangular(L, eye, lower=True)
    inv = linv.T @ linv
    return 0.5 * (inv + inv.T), logdet


def spd_inverse_logdet_jittered(m) -> tuple[np.ndarray, float]:
    """spd_inverse_logdet with one jitter retry for near-singular inputs.

    Jitter is 1e-8 * trace/d on the diagonal; a second failure propagates
    NotPositiveDefinite so the caller can prune.
    """
    m = np.asarray(m, dtype=float)
    try:
        return spd_inverse_logdet(m)
    except NotPositiveDefinite:
        eps = 1e-8 * np.trace(m) / m.shape[0]
        if not eps > 0.0:
            eps = 1e-12
        return spd_inverse_logdet(m + eps * np.eye(m.shape[0]))


def quad_form(v, m) -> float:
    """v.T @ m @ v."""
    v = np.asarray(v, dtype=float)
    m = np.asarray(m, dtype=float)
    if v.shape[-1] != m.shape[0]:
        raise ValueError("dimension mismatch in quad_form")
    return float(v @ m @ v)


def trace_product(a, b) -> float:
    """tr(a @ b) without forming the product."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch in trace_product")
    return float(np.sum(a * b.T))
