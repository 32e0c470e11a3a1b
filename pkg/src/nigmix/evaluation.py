"""External cluster validation: adjusted Rand index and cross-tabulation.

Pair counts are accumulated in exact integer arithmetic before the single
final division, so the chance-correction numerator never suffers
cancellation even for large n.
"""

from __future__ import annotations

import warnings
from math import comb

import numpy as np

__all__ = ["adjusted_rand_index", "cross_tab", "merge_labels", "canonicalize"]


def canonicalize(labels) -> np.ndarray:
    """Relabel to contiguous integers 1..k in order of first appearance."""
    labels = np.asarray(labels)
    _, first = np.unique(labels, return_index=True)
    order = labels[np.sort(first)]
    mapping = {lab: i + 1 for i, lab in enumerate(order)}
    return np.array([mapping[lab] for lab in labels], dtype=int)


def cross_tab(a, b) -> np.ndarray:
    """Contingency counts[i, j] = |{t : a_t = i-th class, b_t = j-th class}|."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError("partitions must have equal length")
    ua, ia = np.unique(a, return_inverse=True)
    ub, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ua.size, ub.size), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    return table


def adjusted_rand_index(a, b) -> float:
    """Hubert-Arabie adjusted Rand index between two partitions.

    Equals 1 iff the partitions are identical up to relabeling; the
    degenerate case where the expected index equals the maximum index
    (e.g. both partitions put everything in one cluster) is returned as 0,
    matching the random-classification convention, with a warning.
    """
    a = np.asarray(a)
    if a.shape[0] < 2:
        raise ValueError("ARI requires at least two observations")
    table = cross_tab(a, b)
    n = int(table.sum())
    sum_cells = sum(comb(int(v), 2) for v in table.reshape(-1) if v > 1)
    sum_rows = sum(comb(int(v), 2) for v in table.sum(axis=1))
    sum_cols = sum(comb(int(v), 2) for v in table.sum(axis=0))
    total = comb(n, 2)
    # ARI = (sum_cells - E) / (max - E) with E = sum_rows*sum_cols/total,
    # cleared of denominators to stay in exact integers.
    num = 2 * (total * sum_cells - sum_rows * sum_cols)
    den = total * (sum_rows + sum_cols) - 2 * sum_rows * sum_cols
    if den == 0:
        warnings.warn("degenerate partitions: expected index equals maximum index")
        return 0.0
    return num / den


def merge_labels(labels, groups) -> np.ndarray:
    """Collapse each set of labels in ``groups`` to a single new label.

    Labels not named in any group keep their own (singleton) class.  The
    result is canonicalized to 1..k.
    """
    labels = np.asarray(labels)
    seen: set = set()
    for grp in groups:
        if seen & set(grp):
            raise ValueError("merge groups must be disjoint")
        seen |= set(grp)
    out = labels.copy()
    for grp in groups:
        grp = sorted(grp)
        rep = grp[0]
        for lab in grp[1:]:
            out = np.where(labels == lab, rep, out)
    return canonicalize(out)
