from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .clustering import ALGORITHMS, cluster
from .metrics import ari, d_metric, nmi, silhouette
from .supervised import SupervisedError, supervised_pairwise


@dataclass
class AlgorithmScores:
    ari: float | None
    nmi: float | None
    silhouette: float
    best: bool = False


@dataclass
class MeasureReport:
    measure: str
    undefined_pairs: int
    silhouette_truth: float | None
    d_metric: float | None
    f1: float | None
    f1_per_seed: list[float] = field(default_factory=list)
    algorithms: dict[str, AlgorithmScores] = field(default_factory=dict)
    best_algorithm: str | None = None


@dataclass
class EvaluationReport:
    dataset: str
    k: int
    seed: int
    labeled: bool
    measures: list[MeasureReport]
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def to_text(self) -> str:
        def fmt(x):
            return "-" if x is None else f"{x:.3f}"

        head = f"{'measure':<24}{'algorithm':<14}{'ARI':>8}{'NMI':>8}{'Sil':>8}{'D(%)':>10}{'F1':>8}{'undef':>7}"
        lines = [f"dataset: {self.dataset}   k={self.k}   seed={self.seed}", head, "-" * len(head)]
        for m in self.measures:
            first = True
            for name, s in m.algorithms.items():
                tag = "*" if s.best else ""
                lines.append(
                    f"{m.measure if first else '':<24}{name + tag:<14}{fmt(s.ari):>8}{fmt(s.nmi):>8}"
                    f"{fmt(m.silhouette_truth if m.silhouette_truth is not None else s.silhouette):>8}"
                    f"{fmt(m.d_metric) if first else '':>10}{fmt(m.f1) if first else '':>8}"
                    f"{str(m.undefined_pairs) if first else '':>7}"
                )
                first = False
        lines.extend(f"note: {n}" for n in self.notes)
        return "\n".join(lines) + "\n"


def evaluate(
    matrices: dict,
    labels=None,
    k: int | None = None,
    seed: int = 0,
    algorithms=ALGORITHMS,
    dataset: str = "",
    supervised: bool = True,
) -> EvaluationReport:
    """Cluster every distance matrix with every algorithm and score the results.

    The algorithm with the highest ARI is tagged ``best`` per measure; the
    others are kept.
    """
    labeled = labels is not None and all(l is not None for l in labels)
    notes = []
    if k is None:
        if not labeled:
            raise ValueError("k is required for an unlabeled dataset")
        k = len(set(labels))
    if not labeled:
        notes.append("dataset is unlabeled: only Silhouette of predicted clusters is reported")
    out = []
    for measure, dm in matrices.items():
        algos = {}
        for algo in algorithms:
            res = cluster(dm, algo, k, seed)
            algos[algo] = AlgorithmScores(
                ari=ari(res.labels, labels) if labeled else None,
                nmi=nmi(res.labels, labels) if labeled else None,
                silhouette=silhouette(dm.values, res.labels),
            )
        best = None
        if labeled:
            best = max(algos, key=lambda a: (algos[a].ari, -list(algorithms).index(a)))
            algos[best].best = True
        f1, per_seed = None, []
        if labeled and supervised:
            try:
                sup = supervised_pairwise(dm, labels, seed)
                f1, per_seed = sup.f1, sup.f1_per_seed
            except SupervisedError as e:
                notes.append(f"{measure}: supervised evaluation skipped ({e})")
        out.append(
            MeasureReport(
                measure=measure,
                undefined_pairs=dm.n_undefined,
                silhouette_truth=silhouette(dm.values, labels) if labeled else None,
                d_metric=d_metric(dm.values, labels) if labeled else None,
                f1=f1,
                f1_per_seed=per_seed,
                algorithms=algos,
                best_algorithm=best,
            )
        )
    return EvaluationReport(dataset, k, seed, labeled, out, notes)


def nearest_neighbors(dm, m: int = 2):
    """Per opinion, the ``m`` nearest and ``m`` farthest others; ties broken by id."""
    ids = dm.ids
    out = {}
    for i, oid in enumerate(ids):
        others = [j for j in range(len(ids)) if j != i]
        near = sorted(others, key=lambda j: (dm.values[i, j], ids[j]))[:m]
        far = sorted(others, key=lambda j: (-dm.values[i, j], ids[j]))[:m]
        out[oid] = (
            [(ids[j], float(dm.values[i, j]), bool(dm.mask[i, j])) for j in near],
            [(ids[j], float(dm.values[i, j]), bool(dm.mask[i, j])) for j in far],
        )
    return out
