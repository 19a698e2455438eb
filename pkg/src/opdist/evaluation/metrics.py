"""Cluster agreement and cluster-quality metrics."""
from __future__ import annotations

import numpy as np


def _encode(labels) -> np.ndarray:
    _, inv = np.unique(np.asarray(labels, dtype=object).astype(str), return_inverse=True)
    return inv.ravel()


def contingency(pred, true) -> np.ndarray:
    p, t = _encode(pred), _encode(true)
    if p.shape != t.shape:
        raise ValueError("label arrays differ in length")
    table = np.zeros((p.max(initial=-1) + 1, t.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(table, (p, t), 1)
    return table


def _comb2(x):
    x = np.asarray(x, dtype=np.float64)
    return x * (x - 1) / 2.0


def ari(pred, true) -> float:
    """Adjusted Rand index. Returns 1.0 when both partitions are trivial in the same way."""
    table = contingency(pred, true)
    n = table.sum()
    if n < 2:
        return 1.0
    sum_cells = _comb2(table).sum()
    sum_rows = _comb2(table.sum(axis=1)).sum()
    sum_cols = _comb2(table.sum(axis=0)).sum()
    expected = sum_rows * sum_cols / _comb2(n)
    max_index = 0.5 * (sum_rows + sum_cols)
    if max_index == expected:
        return 1.0
    return float((sum_cells - expected) / (max_index - expected))


def _entropy(counts) -> float:
    p = np.asarray(counts, dtype=np.float64)
    p = p[p > 0] / p.sum()
    return float(-(p * np.log(p)).sum())


def nmi(pred, true) -> float:
    """Mutual information over the arithmetic mean of the two entropies.

    A labeling with zero entropy (one cluster) gives 0.
    """
    table = contingency(pred, true).astype(np.float64)
    n = table.sum()
    if n == 0:
        return 0.0
    h_pred, h_true = _entropy(table.sum(axis=1)), _entropy(table.sum(axis=0))
    if h_pred == 0 or h_true == 0:
        return 0.0
    pij = table / n
    outer = np.outer(pij.sum(axis=1), pij.sum(axis=0))
    nz = pij > 0
    mi = float((pij[nz] * np.log(pij[nz] / outer[nz])).sum())
    return float(min(1.0, max(0.0, mi / (0.5 * (h_pred + h_true)))))


def silhouette_samples(distmat, labels) -> np.ndarray:
    d = np.asarray(distmat, dtype=np.float64)
    lab = _encode(labels)
    n = len(lab)
    out = np.zeros(n)
    clusters = np.unique(lab)
    if len(clusters) < 2:
        return out
    members = {c: np.flatnonzero(lab == c) for c in clusters}
    for i in range(n):
        own = members[lab[i]]
        if len(own) == 1:
            continue
        a = d[i, own[own != i]].mean()
        b = min(d[i, members[c]].mean() for c in clusters if c != lab[i])
        denom = max(a, b)
        out[i] = 0.0 if denom == 0 else (b - a) / denom
    return out


def silhouette(distmat, labels) -> float:
    """Mean silhouette over all points; singleton clusters contribute 0."""
    s = silhouette_samples(distmat, labels)
    return float(s.mean()) if len(s) else 0.0


def d_metric(distmat, labels) -> float | None:
    """Percent by which the mean inter-cluster distance exceeds the mean intra-cluster distance.

    Sums run over ordered pairs. None when there are no intra or no inter
    pairs, or the intra-cluster mean is zero.
    """
    d = np.asarray(distmat, dtype=np.float64)
    lab = _encode(labels)
    same = lab[:, None] == lab[None, :]
    off = ~np.eye(len(lab), dtype=bool)
    intra, inter = same & off, ~same
    if not intra.any() or not inter.any():
        return None
    intra_total = sum(d[np.ix_(lab == k, lab == k)].sum() - np.trace(d[np.ix_(lab == k, lab == k)]) for k in np.unique(lab))
    inter_total = sum(d[np.ix_(lab == k, lab != k)].sum() for k in np.unique(lab))
    mean_intra = intra_total / intra.sum()
    mean_inter = inter_total / inter.sum()
    if mean_intra == 0:
        return None
    return float(100.0 * (mean_inter - mean_intra) / mean_intra)


def weighted_f1(y_true, y_pred) -> float:
    """Per-class F1 averaged with weights proportional to true support."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if len(y_true) == 0:
        return 0.0
    total = 0.0
    for c in np.unique(np.concatenate([y_true, y_pred])):
        tp = np.sum((y_pred == c) & (y_true == c))
        fp = np.sum((y_pred == c) & (y_true != c))
        fn = np.sum((y_pred != c) & (y_true == c))
        support = tp + fn
        if support == 0:
            continue
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / support
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        total += f1 * support
    return float(total / len(y_true))
