"""Opinion distance, its difference functions, and all-pairs distance matrices."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .matching import DEFAULT_TAU, cost_matrix, flow_to_mapping, solve_transport
from .polarity import OpinionRepresentation

MEASURES = ("od", "od-parse", "tfidf", "text-wmd", "precomputed-embedding")
UNDEFINED_IMPUTE = 1.0
BUCKET_POSITIONS = (-1.0, 0.0, 1.0)


def f_abs(x: float, y: float) -> float:
    return abs(x - y)


def f_jsd(p, q) -> float:
    """Jensen-Shannon divergence, base 2."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    m = 0.5 * (p + q)

    def kl(a):
        nz = a > 0
        return float(np.sum(a[nz] * np.log2(a[nz] / m[nz])))

    return min(1.0, max(0.0, 0.5 * kl(p) + 0.5 * kl(q)))


def f_emd(p, q) -> float:
    """1-D EMD over bucket positions (-1, 0, +1), ground distance halved so the maximum is 1."""
    cp = np.cumsum(np.asarray(p, dtype=np.float64))[:-1]
    cq = np.cumsum(np.asarray(q, dtype=np.float64))[:-1]
    gaps = np.diff(BUCKET_POSITIONS) / 2.0
    return float(min(1.0, np.sum(np.abs(cp - cq) * gaps)))


DIFFERENCE_FNS = {"abs": f_abs, "jsd": f_jsd, "emd": f_emd}


@dataclass(frozen=True)
class DifferenceFn:
    kind: str = "abs"

    def __post_init__(self):
        if self.kind not in DIFFERENCE_FNS:
            raise ValueError(f"difference function must be one of {sorted(DIFFERENCE_FNS)}")

    def __call__(self, x, y) -> float:
        scalar_x = x is not None and np.ndim(x) == 0
        scalar_y = y is not None and np.ndim(y) == 0
        if self.kind == "abs":
            if not (scalar_x and scalar_y):
                raise TypeError("abs difference applies to scalar polarities only")
        elif scalar_x or scalar_y:
            raise TypeError(f"{self.kind} difference applies to distributions only")
        return DIFFERENCE_FNS[self.kind](x, y)


def _canonical_key(rep: OpinionRepresentation):
    return tuple((s.concept_id, repr(p.payload)) for s, p in rep.items)


@dataclass(frozen=True)
class ODResult:
    value: float | None
    mapping: object = None
    cost: np.ndarray | None = None
    flow: np.ndarray | None = None

    @property
    def undefined(self) -> bool:
        return self.value is None


def opinion_distance_detail(rep1, rep2, fn=DifferenceFn("abs"), provider=None, tau: float = DEFAULT_TAU) -> ODResult:
    if not len(rep1) or not len(rep2):
        return ODResult(None)
    if isinstance(fn, str):
        fn = DifferenceFn(fn)
    # solve in a canonical orientation so that OD(a, b) == OD(b, a) bit for bit,
    # even when the optimal plan is not unique
    swapped = _canonical_key(rep2) < _canonical_key(rep1)
    a, b = (rep2, rep1) if swapped else (rep1, rep2)
    cost = cost_matrix(a.subjects, b.subjects, provider)
    flow = solve_transport(cost)
    mapping = flow_to_mapping(flow, cost, tau)
    if not len(mapping):
        return ODResult(None, mapping, cost, flow)
    pa, pb = a.polarities, b.polarities
    total = math.fsum(fn(pa[p.i].payload, pb[p.j].payload) for p in mapping)
    return ODResult(total / (2 * len(mapping)), mapping, cost, flow)


def opinion_distance(rep1, rep2, fn=DifferenceFn("abs"), provider=None, tau: float = DEFAULT_TAU) -> float | None:
    """Mean polarity difference over mapped subject pairs, halved; None when nothing maps."""
    return opinion_distance_detail(rep1, rep2, fn, provider, tau).value


@dataclass
class DistanceMatrix:
    ids: list[str]
    values: np.ndarray
    mask: np.ndarray  # True where the distance was undefined and imputed

    def __post_init__(self):
        n = len(self.ids)
        if self.values.shape != (n, n) or self.mask.shape != (n, n):
            raise ValueError("matrix shape does not match ids")

    @property
    def n_undefined(self) -> int:
        return int(np.triu(self.mask, 1).sum())

    def to_tsv(self, path, mask_path=None) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("id\t" + "\t".join(self.ids) + "\n")
            for oid, row in zip(self.ids, self.values):
                fh.write(oid + "\t" + "\t".join(f"{x:.12g}" for x in row) + "\n")
        if mask_path is not None:
            with open(mask_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("id\t" + "\t".join(self.ids) + "\n")
                for oid, row in zip(self.ids, self.mask):
                    fh.write(oid + "\t" + "\t".join("1" if x else "0" for x in row) + "\n")

    @classmethod
    def from_tsv(cls, path, mask_path=None) -> "DistanceMatrix":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n").split("\t")[1:]
            rows = [line.rstrip("\n").split("\t")[1:] for line in fh if line.strip()]
        values = np.array(rows, dtype=np.float64).reshape(len(header), len(header))
        mask = np.zeros_like(values, dtype=bool)
        if mask_path is not None:
            with open(mask_path, encoding="utf-8") as fh:
                fh.readline()
                mrows = [line.rstrip("\n").split("\t")[1:] for line in fh if line.strip()]
            mask = np.array(mrows, dtype=int).reshape(values.shape).astype(bool)
        return cls(header, values, mask)


def pairwise_matrix(ids: list[str], pair_fn, workers: int = 1) -> DistanceMatrix:
    """Fill a symmetric matrix from ``pair_fn(i, j) -> float | None`` over the upper triangle."""
    n = len(ids)
    values = np.zeros((n, n))
    mask = np.zeros((n, n), dtype=bool)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda ij: pair_fn(*ij), pairs))
    else:
        results = [pair_fn(i, j) for i, j in pairs]
    for (i, j), d in zip(pairs, results):
        if d is None or (isinstance(d, float) and math.isnan(d)):
            d, undefined = UNDEFINED_IMPUTE, True
        else:
            d, undefined = min(1.0, max(0.0, float(d))), False
        values[i, j] = values[j, i] = d
        mask[i, j] = mask[j, i] = undefined
    return DistanceMatrix(list(ids), values, mask)


def od_matrix(reps: list[OpinionRepresentation], fn="abs", provider=None, tau=DEFAULT_TAU, workers=1) -> DistanceMatrix:
    fn = DifferenceFn(fn) if isinstance(fn, str) else fn
    return pairwise_matrix(
        [r.opinion_id for r in reps],
        lambda i, j: opinion_distance(reps[i], reps[j], fn, provider, tau),
        workers,
    )


def tfidf_matrix(dataset, stopwords=frozenset()) -> DistanceMatrix:
    from .semantics import tfidf_vectors

    model = tfidf_vectors(dataset, stopwords)
    return pairwise_matrix(dataset.ids, model.cosine_distance)


def text_wmd_matrix(dataset, store, stopwords=frozenset(), workers=1) -> DistanceMatrix:
    from .semantics import text_wmd

    ops = dataset.opinions
    return pairwise_matrix(dataset.ids, lambda i, j: text_wmd(ops[i], ops[j], store, stopwords), workers)


def embedding_matrix(dataset, embeddings) -> DistanceMatrix:
    from .semantics import semantic_distance

    vecs = [embeddings.get(oid) for oid in dataset.ids]

    def pair(i, j):
        u, v = vecs[i], vecs[j]
        if u is None or v is None or not np.any(u) or not np.any(v):
            return None
        return semantic_distance(u, v)

    return pairwise_matrix(dataset.ids, pair)


class MissingResourceError(ValueError):
    pass


def distance_matrix(dataset, measure: str, *, resources: dict | None = None, config: dict | None = None) -> DistanceMatrix:
    """All-pairs distances for ``measure``.

    ``resources`` holds the loaded inputs a measure needs: ``reps`` (for od
    and od-parse), ``provider``, ``stopwords``, ``vectors``, ``embeddings``.
    """
    resources = resources or {}
    config = config or {}
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}; expected one of {', '.join(MEASURES)}")

    def need(name):
        if resources.get(name) is None:
            raise MissingResourceError(f"measure {measure!r} requires resource {name!r}")
        return resources[name]

    workers = int(config.get("workers", 1))
    if measure in ("od", "od-parse"):
        return od_matrix(
            need("reps"),
            config.get("fn", "abs"),
            resources.get("provider"),
            float(config.get("tau", DEFAULT_TAU)),
            workers,
        )
    if measure == "tfidf":
        return tfidf_matrix(dataset, resources.get("stopwords") or frozenset())
    if measure == "text-wmd":
        return text_wmd_matrix(dataset, need("vectors"), resources.get("stopwords") or frozenset(), workers)
    return embedding_matrix(dataset, need("embeddings"))
