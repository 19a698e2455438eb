"""Batch driver: represent -> distance -> cluster -> evaluate -> report.

Configuration comes from an optional JSON file (``--config``); every field can
be overridden by a flag of the same dotted name, e.g. ``--tau 0.4`` or
``--resources.lexicon lex.tsv``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 missing resource.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import corpus, lexicon, polarity, semantics, spotter
from .corpus import CorpusError
from .deppat import load_rules
from .distance import MEASURES, DifferenceFn, MissingResourceError, distance_matrix
from .evaluation import ALGORITHMS, cluster, evaluate, nearest_neighbors

log = logging.getLogger("opdist")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class ResourceError(Exception):
    pass


@dataclass
class Resources:
    lexicon: str | None = None  # default: bundled lexicon
    shifters: str | None = None  # default: bundled 27-phrase list
    gazetteer: str | None = None
    vectors: str | None = None
    vectors_format: str = "text"
    stopwords: str | None = None  # default: bundled English list
    conllu: str | None = None
    rules: str | None = None  # default: bundled 14 rules
    embeddings: str | None = None  # opinion id -> vector
    concept_embeddings: str | None = None  # concept id -> vector
    tagme_cache: str | None = None


@dataclass
class RunConfig:
    dataset: str | None = None
    format: str | None = None
    measures: list[str] = field(default_factory=lambda: ["od", "tfidf"])
    variant: str = "od"
    polarity: str = "discrete"
    fn: str = "abs"
    shifters: bool = True
    shifter_scope: str = "local"
    shifter_window: int = 3
    tau: float = 0.3
    lp_threshold: float = 0.03
    resources: Resources = field(default_factory=Resources)
    k: int | None = None
    seed: int = 0
    n_seeds: int = 3
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    neighbors: int = 2
    output: str = "out"
    workers: int = 1

    # fields that do not change any computed value
    _NON_SEMANTIC = ("output", "workers")

    def validate(self):
        if not 0.0 <= self.tau <= 1.0:
            raise UsageError("tau must lie in [0, 1]")
        if not 0.0 <= self.lp_threshold <= 1.0:
            raise UsageError("lp_threshold must lie in [0, 1]")
        for m in self.measures:
            if m not in MEASURES:
                raise UsageError(f"unknown measure {m!r}; choose from {', '.join(MEASURES)}")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise UsageError(f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}")
        if self.variant not in polarity.VARIANTS:
            raise UsageError(f"variant must be one of {polarity.VARIANTS}")
        if self.polarity not in polarity.MODES:
            raise UsageError(f"polarity must be one of {polarity.MODES}")
        try:
            DifferenceFn(self.fn)
        except ValueError as e:
            raise UsageError(str(e)) from None
        if (self.fn == "abs") == (self.polarity == "distribution"):
            raise UsageError("fn=abs needs scalar polarity; jsd/emd need polarity=distribution")
        if self.dataset is None:
            raise UsageError("--dataset is required")

    def semantic_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for key in self._NON_SEMANTIC:
            d.pop(key, None)
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.semantic_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


# ---------------------------------------------------------------------------
# config plumbing


def _flat_fields(cls, prefix=""):
    for f in dataclasses.fields(cls):
        if f.name.startswith("_"):
            continue
        if dataclasses.is_dataclass(f.default_factory() if f.default_factory is not dataclasses.MISSING else None):
            yield from _flat_fields(f.default_factory().__class__, prefix + f.name + ".")
        else:
            yield prefix + f.name, f


def _coerce(value: str, f: dataclasses.Field, current):
    typ = str(f.type)
    if typ.startswith("list"):
        return [v for v in value.split(",") if v]
    if typ.startswith("bool"):
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"--{f.name}: expected a boolean, got {value!r}")
    try:
        if typ.startswith("int"):
            return None if value.lower() == "none" else int(value)
        if typ.startswith("float"):
            return float(value)
    except ValueError:
        raise UsageError(f"--{f.name}: bad value {value!r}") from None
    return value


def _apply(cfg: RunConfig, dotted: str, value):
    target = cfg
    *parents, leaf = dotted.split(".")
    for p in parents:
        target = getattr(target, p)
    setattr(target, leaf, value)


def load_config(path: str | None, overrides: dict[str, str]) -> RunConfig:
    cfg = RunConfig()
    if path:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ResourceError(f"config file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise UsageError(f"config {path}: {e}") from None
        for key, value in raw.items():
            if key == "resources":
                for rk, rv in value.items():
                    if not hasattr(cfg.resources, rk):
                        raise UsageError(f"unknown config field resources.{rk}")
                    setattr(cfg.resources, rk, rv)
            elif hasattr(cfg, key) and not key.startswith("_"):
                setattr(cfg, key, value)
            else:
                raise UsageError(f"unknown config field {key}")
    fields = dict(_flat_fields(RunConfig))
    for dotted, value in overrides.items():
        current = cfg
        for part in dotted.split("."):
            current = getattr(current, part)
        _apply(cfg, dotted, _coerce(value, fields[dotted], current))
    return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="opdist", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (
        ("represent", "write subject/polarity representations"),
        ("distance", "write all-pairs distance matrices"),
        ("cluster", "cluster opinions under each measure"),
        ("evaluate", "score clusterings and the supervised pair task"),
        ("report", "nearest and farthest neighbours per opinion"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("-v", "--verbose", action="store_true")
        for dotted, _ in _flat_fields(RunConfig):
            p.add_argument(f"--{dotted}", dest=f"set:{dotted}", metavar="VALUE")
    return parser


# ---------------------------------------------------------------------------
# pipeline pieces


def _resource_path(path: str | None, flag: str) -> str | None:
    if path is not None and not os.path.exists(path):
        raise ResourceError(f"{flag}: file not found: {path}")
    return path


def load_dataset(cfg: RunConfig) -> corpus.Dataset:
    if not os.path.exists(cfg.dataset):
        raise ResourceError(f"--dataset: file not found: {cfg.dataset}")
    return corpus.load_opinions(cfg.dataset, cfg.format)


def _represent_config(cfg: RunConfig, variant: str) -> polarity.RepresentConfig:
    return polarity.RepresentConfig(
        variant=variant,
        polarity=cfg.polarity,
        shifters=cfg.shifters,
        shifter_scope=cfg.shifter_scope,
        shifter_window=cfg.shifter_window,
    )


def build_representations(cfg: RunConfig, dataset: corpus.Dataset, variant: str) -> list[polarity.OpinionRepresentation]:
    res = cfg.resources
    lex = lexicon.load_sentiment_lexicon(_resource_path(res.lexicon, "--resources.lexicon"))
    rconf = _represent_config(cfg, variant)
    if variant == "od-parse":
        if res.conllu is None:
            raise ResourceError("variant od-parse requires --resources.conllu")
        trees = corpus.load_conllu(_resource_path(res.conllu, "--resources.conllu"), dataset.ids)
        rules = load_rules(_resource_path(res.rules, "--resources.rules"))
        return [polarity.represent_od_parse(op.id, trees.get(op.id, []), rules, lex, rconf) for op in dataset]
    shifters = lexicon.load_shifters(_resource_path(res.shifters, "--resources.shifters"))
    if res.gazetteer is not None:
        gaz = spotter.Gazetteer.load(_resource_path(res.gazetteer, "--resources.gazetteer"))
        subjects = [spotter.spot(gaz, op, cfg.lp_threshold) for op in dataset]
    elif res.tagme_cache is not None:
        client = spotter.TagMeClient(
            spotter.TagMeConfig(token=os.environ.get("TAGME_TOKEN"), cache_dir=res.tagme_cache)
        )
        subjects = [
            spotter.spot_tagme(client.annotate(op.text, op.id), cfg.lp_threshold) for op in dataset
        ]
    else:
        raise ResourceError("variant od requires --resources.gazetteer (or --resources.tagme_cache)")
    return [polarity.represent_od(op, subj, lex, shifters, rconf) for op, subj in zip(dataset, subjects)]


def _provider(cfg: RunConfig, store):
    res = cfg.resources
    if store is not None:
        return semantics.WordVectorProvider(store)
    if res.concept_embeddings is not None:
        path = _resource_path(res.concept_embeddings, "--resources.concept_embeddings")
        return semantics.ConceptEmbeddingProvider(semantics.PrecomputedEmbeddings.load(path))
    return semantics.IdentityProvider()


def compute_matrices(cfg: RunConfig, dataset: corpus.Dataset) -> dict:
    res = cfg.resources
    store = None
    if res.vectors is not None:
        store = semantics.load_word_vectors(_resource_path(res.vectors, "--resources.vectors"), res.vectors_format)
    stopwords = semantics.load_stopwords(_resource_path(res.stopwords, "--resources.stopwords"))
    embeddings = None
    if res.embeddings is not None:
        embeddings = semantics.PrecomputedEmbeddings.load(_resource_path(res.embeddings, "--resources.embeddings"))
    out = {}
    for measure in cfg.measures:
        resources = {"stopwords": stopwords, "vectors": store, "embeddings": embeddings}
        if measure in ("od", "od-parse"):
            resources["reps"] = build_representations(cfg, dataset, measure)
            resources["provider"] = _provider(cfg, store)
        try:
            out[measure] = distance_matrix(
                dataset,
                measure,
                resources=resources,
                config={"fn": cfg.fn, "tau": cfg.tau, "workers": cfg.workers},
            )
        except MissingResourceError as e:
            flag = {"vectors": "--resources.vectors", "embeddings": "--resources.embeddings"}
            name = str(e).rsplit("'", 2)[-2]
            raise ResourceError(f"{e} (set {flag.get(name, name)})") from None
    return out


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_represent(cfg: RunConfig) -> Path:
    dataset = load_dataset(cfg)
    reps = build_representations(cfg, dataset, cfg.variant)
    path = _outdir(cfg) / "representations.jsonl"
    _write(path, "".join(json.dumps(polarity.representation_to_json(r), sort_keys=True) + "\n" for r in reps))
    return path


def _manifest(cfg: RunConfig, files: list[str]) -> str:
    return json.dumps(
        {"config": cfg.semantic_dict(), "config_hash": cfg.config_hash(), "files": sorted(files)},
        indent=2,
        sort_keys=True,
    ) + "\n"


def cmd_distance(cfg: RunConfig) -> list[Path]:
    dataset = load_dataset(cfg)
    out = _outdir(cfg)
    written = []
    for measure, dm in compute_matrices(cfg, dataset).items():
        path, mask = out / f"distance_{measure}.tsv", out / f"distance_{measure}.mask.tsv"
        dm.to_tsv(path, mask)
        written += [path, mask]
    _write(out / "manifest.json", _manifest(cfg, [p.name for p in written]))
    return written


def cmd_cluster(cfg: RunConfig) -> Path:
    dataset = load_dataset(cfg)
    k = cfg.k if cfg.k is not None else len(dataset.label_set)
    if not k:
        raise UsageError("--k is required for an unlabeled dataset")
    matrices = compute_matrices(cfg, dataset)
    cols, labels = [], []
    for measure, dm in matrices.items():
        for algo in cfg.algorithms:
            cols.append(f"{measure}/{algo}")
            labels.append(cluster(dm, algo, k, cfg.seed).labels)
    lines = ["id\t" + "\t".join(cols)]
    for i, oid in enumerate(dataset.ids):
        lines.append(oid + "\t" + "\t".join(str(int(l[i])) for l in labels))
    path = _outdir(cfg) / "clusters.tsv"
    _write(path, "\n".join(lines) + "\n")
    return path


def cmd_evaluate(cfg: RunConfig) -> tuple[Path, Path]:
    dataset = load_dataset(cfg)
    labels = dataset.labels
    labeled = bool(dataset.opinions) and all(l is not None for l in labels)
    if not labeled and cfg.k is None:
        raise UsageError("--k is required for an unlabeled dataset")
    matrices = compute_matrices(cfg, dataset)
    report = evaluate(
        matrices,
        labels if labeled else None,
        k=cfg.k,
        seed=cfg.seed,
        algorithms=cfg.algorithms,
        dataset=dataset.name,
    )
    out = _outdir(cfg)
    _write(out / "report.json", report.to_json() + "\n")
    _write(out / "report.txt", report.to_text())
    return out / "report.json", out / "report.txt"


def cmd_report(cfg: RunConfig) -> Path:
    dataset = load_dataset(cfg)
    matrices = compute_matrices(cfg, dataset)
    text = {op.id: op.text for op in dataset}
    neigh = {m: nearest_neighbors(dm, cfg.neighbors) for m, dm in matrices.items()}
    lines = []

    def fmt(entry):
        oid, d, undefined = entry
        value = "undefined(imputed 1.0)" if undefined else f"{d:.4f}"
        return f"      {oid}  {value}  {text[oid]}"

    for op in dataset:
        lines.append(f"== {op.id}: {op.text}")
        for measure, table in neigh.items():
            near, far = table[op.id]
            lines.append(f"  [{measure}] nearest")
            lines.extend(fmt(e) for e in near)
            lines.append(f"  [{measure}] farthest")
            lines.extend(fmt(e) for e in far)
        lines.append("")
    path = _outdir(cfg) / "neighbors.txt"
    _write(path, "\n".join(lines) + ("\n" if lines else ""))
    return path


COMMANDS = {
    "represent": cmd_represent,
    "distance": cmd_distance,
    "cluster": cmd_cluster,
    "evaluate": cmd_evaluate,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    overrides = {k[4:]: v for k, v in vars(args).items() if k.startswith("set:") and v is not None}
    try:
        cfg = load_config(args.config, overrides)
        cfg.validate()
        COMMANDS[args.command](cfg)
    except UsageError as e:
        print(f"opdist: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as e:
        print(f"opdist: resource error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (CorpusError, lexicon.LexiconError, semantics.VectorFormatError, spotter.SpotterError, ValueError) as e:
        print(f"opdist: data error: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
