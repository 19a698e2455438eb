"""Clustering over distance matrices: k-means on rows, k-medoids, spectral."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ALGORITHMS = ("kmeans-rows", "kmedoids", "spectral")
MAX_ITER = 300
SHIFT_TOL = 1e-6


class ClusteringError(ValueError):
    pass


@dataclass(frozen=True)
class ClusteringResult:
    algorithm: str
    k: int
    seed: int
    labels: np.ndarray


def _check_k(n: int, k: int):
    if k < 1:
        raise ClusteringError("k must be positive")
    if k > n:
        raise ClusteringError(f"k={k} exceeds the number of points ({n})")


def _plusplus(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(x)
    chosen = [int(rng.integers(n))]
    d2 = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        free = np.setdiff1d(np.arange(n), chosen)
        w = d2[free]
        if w.sum() > 0:
            nxt = int(rng.choice(free, p=w / w.sum()))
        else:
            nxt = int(rng.choice(free))
        chosen.append(nxt)
        d2 = np.minimum(d2, ((x - x[nxt]) ** 2).sum(axis=1))
    return np.array(chosen)


def lloyd(x, k: int, seed: int = 0) -> np.ndarray:
    """k-means with k-means++ seeding; stops after MAX_ITER rounds or when centroids move < SHIFT_TOL."""
    x = np.asarray(x, dtype=np.float64)
    _check_k(len(x), k)
    rng = np.random.default_rng(seed)
    centers = x[_plusplus(x, k, rng)].copy()
    labels = np.zeros(len(x), dtype=int)
    for _ in range(MAX_ITER):
        dists = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = dists.argmin(axis=1)
        new = centers.copy()
        for c in range(k):
            pts = x[labels == c]
            if len(pts):
                new[c] = pts.mean(axis=0)
            else:
                # empty cluster: move it to the point farthest from its center
                far = int(dists[np.arange(len(x)), labels].argmax())
                new[c] = x[far]
                labels[far] = c
        shift = np.sqrt(((new - centers) ** 2).sum(axis=1)).max()
        centers = new
        if shift < SHIFT_TOL:
            break
    dists = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return dists.argmin(axis=1)


def kmeans_rows(distmat, k: int, seed: int = 0) -> ClusteringResult:
    """k-means treating each row of the distance matrix as a feature vector."""
    values = getattr(distmat, "values", distmat)
    return ClusteringResult("kmeans-rows", k, seed, lloyd(values, k, seed))


def kmedoids(distmat, k: int, seed: int = 0) -> ClusteringResult:
    """Alternating k-medoids directly on the distances."""
    d = np.asarray(getattr(distmat, "values", distmat), dtype=np.float64)
    n = len(d)
    _check_k(n, k)
    rng = np.random.default_rng(seed)
    medoids = [int(rng.integers(n))]
    for _ in range(1, k):
        closest = d[:, medoids].min(axis=1)
        free = np.setdiff1d(np.arange(n), medoids)
        w = closest[free] ** 2
        medoids.append(int(rng.choice(free, p=w / w.sum())) if w.sum() > 0 else int(rng.choice(free)))
    medoids = np.array(medoids)
    for _ in range(MAX_ITER):
        labels = d[:, medoids].argmin(axis=1)
        labels[medoids] = np.arange(k)
        new = medoids.copy()
        for c in range(k):
            members = np.flatnonzero(labels == c)
            new[c] = members[d[np.ix_(members, members)].sum(axis=1).argmin()]
        if np.array_equal(new, medoids):
            break
        medoids = new
    labels = d[:, medoids].argmin(axis=1)
    labels[medoids] = np.arange(k)
    return ClusteringResult("kmedoids", k, seed, labels)


def spectral_embedding(distmat, k: int) -> np.ndarray:
    """Row-normalized eigenvectors of the k smallest eigenvalues of the normalized Laplacian of ``1 - D``."""
    d = np.asarray(getattr(distmat, "values", distmat), dtype=np.float64)
    mask = getattr(distmat, "mask", None)
    affinity = np.clip(1.0 - d, 0.0, 1.0)
    if mask is not None:
        affinity[np.asarray(mask, dtype=bool)] = 0.0
    deg = affinity.sum(axis=1)
    inv_sqrt = np.zeros_like(deg)
    inv_sqrt[deg > 0] = 1.0 / np.sqrt(deg[deg > 0])
    lap = np.eye(len(d)) - inv_sqrt[:, None] * affinity * inv_sqrt[None, :]
    try:
        _, vecs = np.linalg.eigh(lap)
    except np.linalg.LinAlgError as e:
        raise ClusteringError(f"eigen-decomposition failed: {e}") from e
    emb = vecs[:, :k]
    norms = np.linalg.norm(emb, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return emb / norms


def spectral(distmat, k: int, seed: int = 0) -> ClusteringResult:
    n = len(getattr(distmat, "values", distmat))
    _check_k(n, k)
    return ClusteringResult("spectral", k, seed, lloyd(spectral_embedding(distmat, k), k, seed))


CLUSTERERS = {"kmeans-rows": kmeans_rows, "kmedoids": kmedoids, "spectral": spectral}


def cluster(distmat, algorithm: str, k: int, seed: int = 0) -> ClusteringResult:
    try:
        fn = CLUSTERERS[algorithm]
    except KeyError:
        raise ClusteringError(f"unknown algorithm {algorithm!r}") from None
    return fn(distmat, k, seed)
