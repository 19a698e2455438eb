"""Acceptance criteria, one test each. Every test also records a PASS/FAIL line
that pytest prints in an "acceptance criteria" section after the run."""
import random
import time

import numpy as np
import pytest
from oracles import (
    brute_force_matches,
    brute_force_transport,
    make_tree,
    pair_counting_ari,
    random_tree,
    set_partitions,
)

from opdist.corpus import Dataset, Opinion
from opdist.deppat import load_rules, match_pattern
from opdist.distance import distance_matrix, opinion_distance, opinion_distance_detail
from opdist.evaluation import (
    ari,
    cluster,
    logistic_grad,
    logistic_loss,
    nmi,
    silhouette,
    supervised_pairwise,
)
from opdist.evaluation.clustering import ALGORITHMS
from opdist.lexicon import SentimentLexicon, load_shifters
from opdist.matching import solve_transport, transport_objective
from opdist.polarity import (
    OpinionRepresentation,
    RepresentConfig,
    SubjectPolarity,
    represent_opinion,
)
from opdist.semantics import ConceptEmbeddingProvider, PrecomputedEmbeddings
from opdist.spotter import Gazetteer, OpinionSubject, SubjectMention, spot
from opdist.synthetic import contrastive_resources, make_contrastive_corpus

pytestmark = pytest.mark.acceptance


def _subject(cid, surface=None):
    surface = surface or cid.replace("_", " ")
    return OpinionSubject(cid, (SubjectMention("x", 0, (0, 1), surface, cid, 1.0),))


def _rep(oid, items):
    return OpinionRepresentation(oid, tuple((_subject(c), SubjectPolarity("discrete", float(v))) for c, v in items))


def test_worked_example_fidelity(acceptance_line):
    t0 = time.perf_counter()
    # "video game" and "computer games" close; everything else far apart
    emb = PrecomputedEmbeddings(
        {
            "Video_game": np.array([1.0, 0.1, 0.0, 0.0, 0.0]),
            "Computer_game": np.array([1.0, 0.0, 0.0, 0.0, 0.0]),
            "Youth": np.array([0.0, 1.0, 0.0, 0.0, 0.0]),
            "Researcher": np.array([0.0, 0.0, 1.0, 0.0, 0.0]),
            "Media_content": np.array([0.0, 0.0, 0.0, 1.0, 0.0]),
        }
    )
    o1 = _rep("O1", [("Video_game", -1), ("Youth", +1)])
    # researchers carry no stated polarity; discretization maps 0 to +1
    o2 = _rep("O2", [("Researcher", +1), ("Computer_game", +1), ("Media_content", +1)])
    res = opinion_distance_detail(o1, o2, "abs", ConceptEmbeddingProvider(emb))
    subjects_a = res.cost.shape
    f = abs(o1.polarities[0].value - o2.polarities[1].value)
    elapsed = time.perf_counter() - t0
    ok = len(res.mapping) == 1 and f == 2.0 and res.value == 1.0 and elapsed < 1.0 and subjects_a in ((2, 3), (3, 2))
    acceptance_line("worked example: f=2, |M|=1, OD=1", ok, f"OD={res.value}, |M|={len(res.mapping)}, {elapsed:.3f}s")
    assert ok


def test_motivating_pair_separation(acceptance_line):
    t0 = time.perf_counter()
    texts = {
        "a": "In this debate, Hillary looked presidential while Trump came across as manipulative",
        "b": "In this debate, Trump looked presidential while Hillary came across as manipulative",
    }
    ds = Dataset("debate", tuple(Opinion.from_text(k, v) for k, v in texts.items()))
    gaz = Gazetteer()
    gaz.add("Hillary", "Hillary_Clinton", 0.9)
    gaz.add("Trump", "Donald_Trump", 0.9)
    lex = SentimentLexicon({"presidential": 1.0, "manipulative": -1.0})
    reps = [represent_opinion(o, spot(gaz, o), RepresentConfig(), lexicon=lex, shifters=load_shifters()) for o in ds]
    tfidf = distance_matrix(ds, "tfidf").values[0, 1]
    od = opinion_distance(reps[0], reps[1])
    elapsed = time.perf_counter() - t0
    ok = abs(tfidf) <= 1e-9 and od is not None and abs(od - 1.0) <= 1e-9 and elapsed < 1.0
    pols = {s.concept_id: p.value for s, p in reps[0].items}
    acceptance_line("motivating pair: TF-IDF 0, OD 1", ok, f"tfidf={tfidf:.3g}, OD={od}, polarities in a: {pols}")
    assert ok


def test_transport_oracle(acceptance_line):
    t0 = time.perf_counter()
    rng = np.random.default_rng(12345)
    worst = 0.0
    for _ in range(500):
        n1, n2 = rng.integers(1, 5, size=2)
        cost = rng.random((n1, n2))
        if rng.random() < 0.3:
            cost = np.round(cost * 3) / 3  # ties
        got = transport_objective(solve_transport(cost), cost)
        worst = max(worst, abs(got - brute_force_transport(cost)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 30
    acceptance_line("transport oracle (500 instances)", ok, f"max |diff|={worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_dependency_pattern_oracle(acceptance_line):
    t0 = time.perf_counter()
    rules = load_rules()
    rnd = random.Random(7)
    mismatches = 0
    nonempty = 0
    for _ in range(200):
        heads, deprels, tags = random_tree(rnd, rnd.randint(1, 6))
        tree = make_tree(heads, deprels, tags)
        for r, rule in enumerate(rules):
            got = {frozenset(m.items()) for m in match_pattern(rule, tree)}
            want = brute_force_matches(r, heads, deprels, tags)
            nonempty += bool(want)
            mismatches += got != want
    elapsed = time.perf_counter() - t0
    ok = len(rules) == 14 and mismatches == 0 and elapsed < 30
    acceptance_line(
        "dependency-pattern oracle (200 trees x 14 rules)", ok, f"mismatches={mismatches}, non-empty={nonempty}, {elapsed:.1f}s"
    )
    assert ok


def test_metric_correctness(acceptance_line):
    worst = 0.0
    for n in range(1, 7):
        parts = list(set_partitions(n))
        for p in parts:
            for t in parts:
                worst = max(worst, abs(ari(p, t) - pair_counting_ari(p, t)))
    # points on a line at 0, 1, 10, 11
    x = np.array([0.0, 1.0, 10.0, 11.0])
    d = np.abs(x[:, None] - x[None, :])
    sil = silhouette(d, [0, 0, 1, 1])
    sil_want = 359 / 399  # 1 - (1/21 + 1/19)
    mi = 0.5 * np.log(4 / 3) + 0.25 * np.log(2 / 3) + 0.25 * np.log(2)
    h_true = -(0.75 * np.log(0.75) + 0.25 * np.log(0.25))
    nmi_want = mi / (0.5 * (np.log(2) + h_true))
    nmi_got = nmi([0, 0, 1, 1], [0, 0, 0, 1])
    ok = worst <= 1e-12 and abs(sil - sil_want) <= 1e-9 and abs(nmi_got - nmi_want) <= 1e-9
    acceptance_line(
        "metric correctness (ARI exhaustive N<=6, Silhouette, NMI)",
        ok,
        f"ARI max |diff|={worst:.1e}, sil={sil:.9f}, nmi={nmi_got:.9f}",
    )
    assert ok


def _od_reps(ds, shifters=True):
    gaz, lex = contrastive_resources()
    cfg = RepresentConfig(shifters=shifters)
    sh = load_shifters()
    return [represent_opinion(o, spot(gaz, o), cfg, lexicon=lex, shifters=sh) for o in ds]


def _aris(dm, labels):
    k = len(set(labels))
    return {a: ari(cluster(dm, a, k, seed=0).labels, labels) for a in ALGORITHMS}


def test_synthetic_contrastive_corpus(acceptance_line):
    t0 = time.perf_counter()
    ds = make_contrastive_corpus(20, seed=0)
    od = _aris(distance_matrix(ds, "od", resources={"reps": _od_reps(ds)}), ds.labels)
    tf = _aris(distance_matrix(ds, "tfidf"), ds.labels)
    elapsed = time.perf_counter() - t0
    ok = min(od.values()) >= 0.9 and max(tf.values()) <= 0.1 and elapsed < 60
    fmt = lambda d: ", ".join(f"{k}={v:.3f}" for k, v in d.items())
    acceptance_line("synthetic corpus: OD ARI >= 0.9, TF-IDF ARI <= 0.1", ok, f"OD [{fmt(od)}]; TF-IDF [{fmt(tf)}]; {elapsed:.1f}s")
    assert ok


def test_shifter_ablation_direction(acceptance_line):
    ds = make_contrastive_corpus(20, seed=0, negated_fraction=0.5)
    on = _aris(distance_matrix(ds, "od", resources={"reps": _od_reps(ds, True)}), ds.labels)
    off = _aris(distance_matrix(ds, "od", resources={"reps": _od_reps(ds, False)}), ds.labels)
    ok = all(on[a] > off[a] for a in ALGORITHMS)
    acceptance_line(
        "shifter ablation: ARI with shifters > without",
        ok,
        ", ".join(f"{a}: {on[a]:.3f} vs {off[a]:.3f}" for a in ALGORITHMS),
    )
    assert ok


def test_supervised_sanity(acceptance_line):
    rng = np.random.default_rng(3)
    x = rng.normal(size=(40, 5))
    y = (rng.random(40) < 0.5).astype(float)
    params = rng.normal(size=6)
    g = logistic_grad(params, x, y, 1e-2)
    h = 1e-6
    fd = np.array(
        [
            (logistic_loss(params + h * e, x, y, 1e-2) - logistic_loss(params - h * e, x, y, 1e-2)) / (2 * h)
            for e in np.eye(6)
        ]
    )
    rel = float(np.linalg.norm(g - fd) / np.linalg.norm(fd))
    ds = make_contrastive_corpus(20, seed=0)
    f1_od = supervised_pairwise(distance_matrix(ds, "od", resources={"reps": _od_reps(ds)}), ds.labels, seed=0, n_seeds=3).f1
    f1_tf = supervised_pairwise(distance_matrix(ds, "tfidf"), ds.labels, seed=0, n_seeds=3).f1
    ok = rel < 1e-5 and f1_od >= 0.9 and f1_tf <= 0.6
    acceptance_line(
        "supervised sanity: gradient check, OD F1 >= 0.9, TF-IDF F1 <= 0.6",
        ok,
        f"grad rel err={rel:.1e}, OD F1={f1_od:.3f}, TF-IDF F1={f1_tf:.3f}",
    )
    assert ok


def test_cli_determinism(acceptance_line, tmp_path):
    from opdist.cli import main
    from opdist.corpus import dump_opinions

    dump_opinions(make_contrastive_corpus(6, seed=1), tmp_path / "ops.jsonl")
    (tmp_path / "gaz.tsv").write_text("video games\tVideo_game\t0.5\nparents\tParent\t0.5\n")
    (tmp_path / "lex.tsv").write_text("word\tscore\ngood\t1.0\nbad\t-1.0\n")
    runs = []
    for r in range(2):
        out = tmp_path / f"run{r}"
        for cmd in ("represent", "distance", "cluster", "evaluate", "report"):
            code = main(
                [
                    cmd,
                    "--dataset", str(tmp_path / "ops.jsonl"),
                    "--resources.gazetteer", str(tmp_path / "gaz.tsv"),
                    "--resources.lexicon", str(tmp_path / "lex.tsv"),
                    "--output", str(out),
                ]
            )
            assert code == 0
        runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    ok = runs[0] == runs[1] and len(runs[0]) >= 9
    diff = sorted(k for k in runs[0] if runs[0][k] != runs[1].get(k))
    acceptance_line("determinism: CLI reruns byte-identical", ok, f"{len(runs[0])} files, differing: {diff or 'none'}")
    assert ok
