"""Pairwise same-label classification from distance-matrix rows."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .metrics import weighted_f1

TRAIN_FRACTION = 0.7
N_SEEDS = 3


class SupervisedError(ValueError):
    pass


def _sigmoid(z):
    return np.where(z >= 0, 1.0 / (1.0 + np.exp(-np.abs(z))), np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))))


def logistic_loss(params, x, y, l2: float) -> float:
    """Mean log-loss plus ``l2/2 * |w|^2``; the bias (last entry) is not penalized."""
    w, b = params[:-1], params[-1]
    z = x @ w + b
    # log(1 + e^z) - y z, computed stably
    loss = np.mean(np.logaddexp(0.0, z) - y * z)
    return float(loss + 0.5 * l2 * w @ w)


def logistic_grad(params, x, y, l2: float) -> np.ndarray:
    w, b = params[:-1], params[-1]
    r = _sigmoid(x @ w + b) - y
    g = np.empty_like(params)
    g[:-1] = x.T @ r / len(y) + l2 * w
    g[-1] = r.mean()
    return g


@dataclass
class LogisticRegression:
    """L2-regularized logistic regression fit by fixed-step gradient descent.

    The step is 1/L for the gradient's Lipschitz constant L, which makes the
    loss non-increasing from one iteration to the next.
    """

    l2: float = 1e-2
    tol: float = 1e-6
    max_iter: int = 200_000
    params: np.ndarray | None = None
    losses: list[float] = field(default_factory=list)
    converged: bool = False

    def fit(self, x, y, record_losses: bool = False) -> "LogisticRegression":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        xb = np.hstack([x, np.ones((len(x), 1))])
        lip = 0.25 * np.linalg.norm(xb, 2) ** 2 / len(x) + self.l2
        step = 1.0 / lip
        params = np.zeros(x.shape[1] + 1)
        self.losses = []
        self.converged = False
        for _ in range(self.max_iter):
            g = logistic_grad(params, x, y, self.l2)
            if record_losses:
                self.losses.append(logistic_loss(params, x, y, self.l2))
            if np.linalg.norm(g) < self.tol:
                self.converged = True
                break
            params = params - step * g
        self.params = params
        return self

    def predict_proba(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return _sigmoid(x @ self.params[:-1] + self.params[-1])

    def predict(self, x) -> np.ndarray:
        return (self.predict_proba(x) >= 0.5).astype(int)


def pair_features(rows: np.ndarray, idx, featurization: str = "absdiff"):
    """Feature vectors and index pairs for all unordered pairs within ``idx``."""
    idx = sorted(int(i) for i in idx)
    pairs = [(i, j) for a, i in enumerate(idx) for j in idx[a + 1 :]]
    if not pairs:
        return np.zeros((0, rows.shape[1] * (2 if featurization == "concat" else 1))), pairs
    i, j = np.array(pairs).T
    if featurization == "absdiff":
        feats = np.abs(rows[i] - rows[j])
    elif featurization == "concat":
        feats = np.hstack([rows[i], rows[j]])
    else:
        raise SupervisedError(f"unknown featurization {featurization!r}")
    return feats, pairs


def split_opinions(n: int, seed: int, train_fraction: float = TRAIN_FRACTION):
    order = np.random.default_rng(seed).permutation(n)
    n_train = int(round(train_fraction * n))
    train, test = np.sort(order[:n_train]), np.sort(order[n_train:])
    if len(train) < 2 or len(test) < 2:
        raise SupervisedError(f"split of {n} opinions leaves a side with fewer than 2 opinions")
    return train, test


@dataclass
class SupervisedResult:
    f1_per_seed: list[float]
    seeds: list[int]

    @property
    def f1(self) -> float:
        return float(np.mean(self.f1_per_seed))


def supervised_pairwise(
    matrices,
    labels,
    seed: int = 0,
    n_seeds: int = N_SEEDS,
    featurization: str = "absdiff",
    l2: float = 1e-2,
) -> SupervisedResult:
    """Weighted F1 of a same-label pair classifier, averaged over ``n_seeds`` splits.

    ``matrices`` is one distance matrix or a list whose rows are concatenated
    (e.g. an opinion distance plus TF-IDF). Opinions are split 70/30 and pairs
    are formed within each side only.
    """
    if not isinstance(matrices, (list, tuple)):
        matrices = [matrices]
    rows = np.hstack([np.asarray(getattr(m, "values", m), dtype=np.float64) for m in matrices])
    labels = np.asarray([str(x) for x in labels])
    if len(set(labels)) < 2:
        raise SupervisedError("need at least two distinct labels")
    scores, seeds = [], []
    for s in range(seed, seed + n_seeds):
        train, test = split_opinions(len(labels), s)
        xtr, ptr = pair_features(rows, train, featurization)
        xte, pte = pair_features(rows, test, featurization)
        ytr = np.array([labels[i] == labels[j] for i, j in ptr], dtype=int)
        yte = np.array([labels[i] == labels[j] for i, j in pte], dtype=int)
        model = LogisticRegression(l2=l2).fit(xtr, ytr)
        scores.append(weighted_f1(yte, model.predict(xte)))
        seeds.append(s)
    return SupervisedResult(scores, seeds)
