"""Machinery shared by the univariate and multivariate engines.

Holds the result containers, the deterministic initial-partition helpers
(one-hot random assignment and a small seeded Lloyd k-means), and the
log-sum-exp row normalization with its uniform-row underflow fallback.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DegenerateComponent",
    "DegenerateFit",
    "FitResult",
    "initial_partition",
    "kmeans_labels",
    "normalize_log_scores",
    "one_hot",
]


class DegenerateComponent(Exception):
    """A component's hyperparameters left the valid region; prune it."""


class DegenerateFit(Exception):
    """Every component was pruned; no usable fit exists."""


@dataclass
class FitResult:
    """Converged (or flagged) state of a variational fit."""

    model: str
    surviving: list[int]
    hypers: list
    bundles: list
    resp: np.ndarray
    labels: np.ndarray
    iterations: int
    converged: bool
    trace: list[dict] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    @property
    def n_components(self) -> int:
        return len(self.surviving)

    @property
    def weights(self) -> np.ndarray:
        a0 = np.array([h.a0 for h in self.hypers])
        return a0 / a0.sum()


def one_hot(labels: np.ndarray, k: int) -> np.ndarray:
    resp = np.zeros((labels.shape[0], k))
    resp[np.arange(labels.shape[0]), labels] = 1.0
    return resp


def kmeans_labels(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Plain seeded Lloyd iteration with k-means++ style seeding.

    Deterministic for a fixed generator state; entirely sufficient for
    producing an initial hard partition.
    """
    data = np.atleast_2d(data.T).T if data.ndim == 1 else data
    n = data.shape[0]
    centers = np.empty((k, data.shape[1]))
    centers[0] = data[rng.integers(n)]
    d2 = np.sum((data - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        probs = d2 / d2.sum() if d2.sum() > 0 else np.full(n, 1.0 / n)
        centers[j] = data[rng.choice(n, p=probs)]
        d2 = np.minimum(d2, np.sum((data - centers[j]) ** 2, axis=1))
    labels = np.zeros(n, dtype=int)
    for _ in range(100):
        dist = ((data[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = dist.argmin(axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            mask = labels == j
            if mask.any():
                centers[j] = data[mask].mean(axis=0)
    return labels


def initial_partition(
    data: np.ndarray, g_init: int, init_mode: str, rng: np.random.Generator
) -> np.ndarray:
    """One-hot initial responsibilities from a random or k-means partition."""
    n = data.shape[0]
    if g_init >= n:
        raise ValueError("g_init must be smaller than the number of observations")
    if init_mode == "random":
        labels = rng.integers(0, g_init, size=n)
    elif init_mode == "kmeans":
        labels = kmeans_labels(np.asarray(data, dtype=float), g_init, rng)
    else:
        raise ValueError(f"unknown init_mode {init_mode!r}")
    return one_hot(labels, g_init)


def normalize_log_scores(log_scores: np.ndarray) -> tuple[np.ndarray, list[str]]:
    """Row-wise softmax of log scores with a uniform fallback.

    Rows where every score is non-finite (transient underflow at far
    outliers) become uniform and are reported in the returned flags.
    """
    n, k = log_scores.shape
    flags: list[str] = []
    scores = np.array(log_scores, dtype=float)
    finite_row = np.isfinite(scores).any(axis=1)
    if not finite_row.all():
        for i in np.nonzero(~finite_row)[0]:
            flags.append(f"underflow_row:{i}")
        scores[~finite_row] = 0.0
    scores -= scores.max(axis=1, keepdims=True)
    resp = np.exp(scores)
    resp /= resp.sum(axis=1, keepdims=True)
    return resp, flags
