"""Opinion corpora: loading, tokenization, sentence splitting and CoNLL-U ingestion."""
from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from pathlib import Path

__all__ = [
    "CorpusError",
    "Token",
    "Sentence",
    "Opinion",
    "Dataset",
    "ParsedToken",
    "ParsedSentence",
    "tokenize",
    "load_opinions",
    "dump_opinions",
    "load_conllu",
    "dump_conllu",
]


class CorpusError(ValueError):
    """Raised for malformed corpus files. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
        self.line = line
        self.path = path


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    char_span: tuple[int, int]


@dataclass(frozen=True)
class Sentence:
    index: int
    tokens: tuple[Token, ...]

    @property
    def words(self) -> list[str]:
        return [t.normalized for t in self.tokens]


@dataclass(frozen=True)
class Opinion:
    id: str
    text: str
    label: str | None = None
    sentences: tuple[Sentence, ...] = ()

    @classmethod
    def from_text(cls, id: str, text: str, label: str | None = None) -> "Opinion":
        return cls(id=id, text=text, label=label, sentences=tuple(tokenize(text)))

    @property
    def tokens(self) -> list[Token]:
        return [t for s in self.sentences for t in s.tokens]


@dataclass(frozen=True)
class Dataset:
    name: str
    opinions: tuple[Opinion, ...] = ()

    def __post_init__(self):
        seen = set()
        for op in self.opinions:
            if op.id in seen:
                raise CorpusError(f"duplicate opinion id {op.id!r}")
            seen.add(op.id)

    @property
    def label_set(self) -> frozenset[str]:
        return frozenset(op.label for op in self.opinions if op.label is not None)

    @property
    def ids(self) -> list[str]:
        return [op.id for op in self.opinions]

    @property
    def labels(self) -> list[str | None]:
        return [op.label for op in self.opinions]

    def __len__(self) -> int:
        return len(self.opinions)

    def __iter__(self):
        return iter(self.opinions)

    def __getitem__(self, i):
        return self.opinions[i]


# ---------------------------------------------------------------------------
# tokenization

_WORD_RE = re.compile(r"\w+(?:[-'\u2019]\w+)*|[^\w\s]", re.UNICODE)
# PTB-style clitics, split off their host word.
_CLITIC_RE = re.compile(r"(?i)^(\w.*?)(n['\u2019]t|['\u2019](?:s|re|ve|ll|d|m))$")
_TERMINAL = {".", "!", "?"}


def _raw_tokens(text: str) -> list[Token]:
    out = []
    for m in _WORD_RE.finditer(text):
        s, start = m.group(0), m.start()
        pieces = [s]
        c = _CLITIC_RE.match(s)
        if c:
            pieces = [c.group(1), c.group(2)]
        for piece in pieces:
            end = start + len(piece)
            norm = piece.lower().replace("\u2019", "'")
            out.append(Token(surface=piece, normalized=norm, char_span=(start, end)))
            start = end
    return out


def tokenize(text: str) -> list[Sentence]:
    """Split ``text`` into sentences of tokens.

    Sentences end at ``.``, ``!`` or ``?`` when followed by whitespace or the
    end of the text. English clitics (``n't``, ``'s``, ...) become separate
    tokens so that shifters like ``n't`` can be matched.
    """
    sentences: list[Sentence] = []
    current: list[Token] = []
    for tok in _raw_tokens(text):
        current.append(tok)
        end = tok.char_span[1]
        if tok.surface in _TERMINAL and (end == len(text) or text[end].isspace()):
            sentences.append(Sentence(len(sentences), tuple(current)))
            current = []
    if current:
        sentences.append(Sentence(len(sentences), tuple(current)))
    return sentences


# ---------------------------------------------------------------------------
# JSONL / TSV


def load_opinions(path, format: str | None = None, name: str | None = None) -> Dataset:
    """Load a dataset from JSONL (``{"id", "text", "label"}``) or TSV (``id, label, text``)."""
    path = Path(path)
    if format is None:
        format = "tsv" if path.suffix.lower() in (".tsv", ".tab") else "jsonl"
    try:
        raw = path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as e:
        raise CorpusError(f"not valid UTF-8 ({e.reason})", path=str(path)) from e
    if format == "jsonl":
        records = _parse_jsonl(raw, str(path))
    elif format == "tsv":
        records = _parse_tsv(raw, str(path))
    else:
        raise ValueError(f"unknown corpus format {format!r}")

    opinions = []
    seen: dict[str, int] = {}
    for lineno, rid, text, label in records:
        if rid in seen:
            raise CorpusError(f"duplicate id {rid!r} (first seen on line {seen[rid]})", lineno, str(path))
        seen[rid] = lineno
        opinions.append(Opinion.from_text(rid, text, label))
    return Dataset(name=name or path.stem, opinions=tuple(opinions))


def _parse_jsonl(raw: str, path: str):
    for lineno, line in enumerate(raw.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise CorpusError(f"invalid JSON: {e.msg}", lineno, path) from e
        if not isinstance(rec, dict):
            raise CorpusError("record is not a JSON object", lineno, path)
        for key in ("id", "text"):
            if key not in rec:
                raise CorpusError(f"missing field {key!r}", lineno, path)
        if not isinstance(rec["text"], str):
            raise CorpusError("field 'text' must be a string", lineno, path)
        label = rec.get("label")
        yield lineno, str(rec["id"]), rec["text"], None if label is None else str(label)


def _parse_tsv(raw: str, path: str):
    reader = csv.reader(io.StringIO(raw), delimiter="\t", quoting=csv.QUOTE_NONE)
    header = None
    for row in reader:
        lineno = reader.line_num
        if header is None:
            if not row:
                continue
            header = [h.strip().lower() for h in row]
            missing = {"id", "label", "text"} - set(header)
            if missing:
                raise CorpusError(f"TSV header lacks columns {sorted(missing)}", lineno, path)
            col = {h: i for i, h in enumerate(header)}
            continue
        if not row or row == [""]:
            continue
        if len(row) != len(header):
            raise CorpusError(f"expected {len(header)} columns, got {len(row)}", lineno, path)
        label = row[col["label"]]
        yield lineno, row[col["id"]], row[col["text"]], label or None


def dump_opinions(dataset: Dataset, path) -> None:
    """Write ``dataset`` as JSONL readable by :func:`load_opinions`."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for op in dataset.opinions:
            fh.write(json.dumps({"id": op.id, "text": op.text, "label": op.label}, ensure_ascii=False))
            fh.write("\n")


# ---------------------------------------------------------------------------
# CoNLL-U


@dataclass(frozen=True)
class ParsedToken:
    index: int  # 1-based, as in CoNLL-U
    form: str
    lemma: str
    tag: str
    head: int  # 0 = root
    deprel: str
    ner: str | None = None
    upos: str = "_"
    xpos: str = "_"
    misc: str = "_"


@dataclass(frozen=True)
class ParsedSentence:
    tokens: tuple[ParsedToken, ...]
    opinion_id: str | None = None

    def __post_init__(self):
        validate_tree([t.head for t in self.tokens])

    def __len__(self):
        return len(self.tokens)

    def node(self, i: int) -> ParsedToken:
        return self.tokens[i - 1]

    def children(self, i: int) -> list[ParsedToken]:
        return [t for t in self.tokens if t.head == i]


def validate_tree(heads: list[int]) -> None:
    """Check that 1-based ``heads`` form a single rooted tree; raise CorpusError otherwise."""
    n = len(heads)
    roots = [i + 1 for i, h in enumerate(heads) if h == 0]
    for i, h in enumerate(heads, 1):
        if not 0 <= h <= n:
            raise CorpusError(f"token {i} has head {h} outside 0..{n}")
        if h == i:
            raise CorpusError(f"token {i} is its own head (cycle)")
    if n and len(roots) != 1:
        raise CorpusError(f"expected exactly one root, found {len(roots)}")
    for start in range(1, n + 1):
        seen = set()
        node = start
        while node != 0:
            if node in seen:
                raise CorpusError(f"cycle in heads through token {node}")
            seen.add(node)
            node = heads[node - 1]


def _misc_ner(misc: str) -> str | None:
    if misc in ("_", ""):
        return None
    for item in misc.split("|"):
        key, _, value = item.partition("=")
        if key.upper() == "NER" and value and value != "O":
            return value
    return None


def load_conllu(path, known_ids=None) -> dict[str, list[ParsedSentence]]:
    """Read CoNLL-U trees grouped by ``# opinion_id = <id>`` comment blocks.

    Returns an insertion-ordered mapping opinion id -> parsed sentences. The
    tag used for pattern matching is XPOS, falling back to UPOS when XPOS is
    ``_``. ``known_ids``, when given, restricts the accepted opinion ids.
    """
    path = Path(path)
    out: dict[str, list[ParsedSentence]] = {}
    current_id = None
    rows: list[ParsedToken] = []
    start_line = 0
    known = None if known_ids is None else set(known_ids)

    def flush():
        nonlocal rows
        if not rows:
            return
        if current_id is None:
            raise CorpusError("sentence before any '# opinion_id =' comment", start_line, str(path))
        try:
            sent = ParsedSentence(tuple(rows), current_id)
        except CorpusError as e:
            raise CorpusError(str(e), start_line, str(path)) from None
        out.setdefault(current_id, []).append(sent)
        rows = []

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                flush()
                continue
            if line.startswith("#"):
                key, sep, value = line[1:].partition("=")
                if sep and key.strip() == "opinion_id":
                    flush()
                    current_id = value.strip()
                    if known is not None and current_id not in known:
                        raise CorpusError(f"unknown opinion_id {current_id!r}", lineno, str(path))
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise CorpusError(f"expected 10 columns, got {len(cols)}", lineno, str(path))
            if "-" in cols[0] or "." in cols[0]:
                continue  # multiword ranges and empty nodes
            if not rows:
                start_line = lineno
            try:
                idx, head = int(cols[0]), int(cols[6])
            except ValueError:
                raise CorpusError("non-integer ID or HEAD", lineno, str(path)) from None
            if idx != len(rows) + 1:
                raise CorpusError(f"token id {idx} out of sequence", lineno, str(path))
            xpos, upos = cols[4], cols[3]
            rows.append(
                ParsedToken(
                    index=idx,
                    form=cols[1],
                    lemma=cols[2],
                    tag=xpos if xpos != "_" else upos,
                    head=head,
                    deprel=cols[7],
                    ner=_misc_ner(cols[9]),
                    upos=upos,
                    xpos=xpos,
                    misc=cols[9],
                )
            )
    flush()
    return out


def dump_conllu(trees: dict[str, list[ParsedSentence]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for oid, sents in trees.items():
            fh.write(f"# opinion_id = {oid}\n")
            for sent in sents:
                for t in sent.tokens:
                    misc = t.misc
                    if misc == "_" and t.ner:
                        misc = f"NER={t.ner}"
                    upos = t.upos if t.upos != "_" or t.xpos != "_" else t.tag
                    xpos = t.xpos if t.upos != "_" or t.xpos != "_" else "_"
                    cols = [str(t.index), t.form, t.lemma, upos, xpos, "_", str(t.head), t.deprel, "_", misc]
                    fh.write("\t".join(cols) + "\n")
                fh.write("\n")
