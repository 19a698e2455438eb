import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn import metrics as skm

from opdist.distance import DistanceMatrix
from opdist.evaluation import (
    ClusteringError,
    LogisticRegression,
    ari,
    cluster,
    d_metric,
    evaluate,
    kmedoids,
    nearest_neighbors,
    nmi,
    silhouette,
    spectral,
    supervised_pairwise,
    weighted_f1,
)
from opdist.evaluation.clustering import spectral_embedding

labelings = st.lists(st.integers(0, 3), min_size=2, max_size=12)


@settings(max_examples=200)
@given(st.data())
def test_ari_nmi_agree_with_sklearn(data):
    a = data.draw(labelings)
    b = data.draw(st.lists(st.integers(0, 3), min_size=len(a), max_size=len(a)))
    assert ari(a, b) == pytest.approx(skm.adjusted_rand_score(b, a), abs=1e-12)
    if len(set(a)) > 1 and len(set(b)) > 1:
        assert nmi(a, b) == pytest.approx(skm.normalized_mutual_info_score(b, a), abs=1e-12)


def test_nmi_single_cluster_is_zero():
    assert nmi([0, 0, 0], [0, 1, 1]) == 0.0


def test_silhouette_against_sklearn():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(15, 2))
    d = np.linalg.norm(x[:, None] - x[None], axis=-1)
    lab = [0] * 5 + [1] * 5 + [2] * 4 + [3]
    assert silhouette(d, lab) == pytest.approx(skm.silhouette_score(d, lab, metric="precomputed"), abs=1e-12)


def test_d_metric_hand_case():
    # intra distance 0.1, inter distance 0.9: (0.9 - 0.1) / 0.1 = 800%
    d = np.array([[0, 0.1, 0.9, 0.9], [0.1, 0, 0.9, 0.9], [0.9, 0.9, 0, 0.1], [0.9, 0.9, 0.1, 0]])
    assert d_metric(d, [0, 0, 1, 1]) == pytest.approx(800.0)
    assert d_metric(d, [0, 1, 2, 3]) is None


def test_weighted_f1_against_sklearn():
    rng = np.random.default_rng(2)
    y = rng.integers(0, 2, 50)
    p = rng.integers(0, 2, 50)
    assert weighted_f1(y, p) == pytest.approx(skm.f1_score(y, p, average="weighted"))


def block(n_per=5, k=2, far=0.9):
    lab = np.repeat(np.arange(k), n_per)
    d = np.where(lab[:, None] == lab[None], 0.1, far)
    np.fill_diagonal(d, 0.0)
    ids = [f"o{i:02d}" for i in range(len(lab))]
    return DistanceMatrix(ids, d, np.zeros_like(d, dtype=bool)), [str(x) for x in lab]


@pytest.mark.parametrize("algo", ["kmeans-rows", "kmedoids", "spectral"])
def test_clusterers_recover_blocks(algo):
    dm, lab = block(6, 3)
    res = cluster(dm, algo, 3, seed=0)
    assert ari(res.labels, lab) == 1.0
    again = cluster(dm, algo, 3, seed=0)
    assert list(res.labels) == list(again.labels)


def test_spectral_embedding_separates_components():
    dm, lab = block(4, 2, far=1.0)
    emb = spectral_embedding(dm, 2)
    rows = np.round(emb, 6)
    assert len({tuple(r) for r in rows[:4]}) == 1
    assert len({tuple(r) for r in rows[4:]}) == 1
    assert not np.allclose(rows[0], rows[4])


def test_bad_k():
    dm, _ = block(2, 2)
    with pytest.raises(ClusteringError):
        kmedoids(dm, 5)
    with pytest.raises(ClusteringError):
        spectral(dm, 0)


def test_logistic_loss_non_increasing():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(60, 3))
    y = (x[:, 0] + 0.3 * rng.normal(size=60) > 0).astype(float)
    model = LogisticRegression(max_iter=500).fit(x, y, record_losses=True)
    assert all(b <= a + 1e-12 for a, b in zip(model.losses, model.losses[1:]))
    full = LogisticRegression().fit(x, y)
    assert full.converged
    assert (full.predict(x) == y).mean() > 0.8


def test_supervised_on_clean_blocks():
    dm, lab = block(10, 2)
    res = supervised_pairwise(dm, lab, seed=0)
    assert res.f1 == 1.0
    assert len(res.f1_per_seed) == 3
    concat = supervised_pairwise([dm, dm], lab, featurization="concat")
    assert len(concat.seeds) == 3


def test_evaluate_report_and_neighbors():
    dm, lab = block(5, 2)
    rep = evaluate({"od": dm}, lab, seed=0)
    (m,) = rep.measures
    assert m.best_algorithm == "kmeans-rows"
    assert m.algorithms["kmeans-rows"].ari == 1.0
    assert m.d_metric == pytest.approx(800.0)
    assert "od" in rep.to_text() and '"measure": "od"' in rep.to_json()
    nb = nearest_neighbors(dm, 2)
    near, far = nb["o00"]
    assert [n for n, _, _ in near] == ["o01", "o02"]
    assert [n for n, _, _ in far] == ["o05", "o06"]


def test_evaluate_unlabeled_needs_k():
    dm, _ = block(3, 2)
    with pytest.raises(ValueError):
        evaluate({"od": dm}, None)
    rep = evaluate({"od": dm}, None, k=2)
    assert rep.measures[0].algorithms["kmedoids"].ari is None
    assert rep.notes
