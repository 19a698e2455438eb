"""Semantic distance providers: word vectors, precomputed embeddings and TF-IDF."""
from __future__ import annotations

import struct
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Dataset, Opinion

DOC_EMBEDDING_THRESHOLD = 0.3
WORD_VECTOR_THRESHOLD = 0.6


class VectorFormatError(ValueError):
    pass


class VectorStore:
    """Token -> dense vector, all of one dimension."""

    def __init__(self, vectors: dict[str, np.ndarray] | None = None, dim: int | None = None):
        self._vecs: dict[str, np.ndarray] = {}
        self.dim = dim
        for w, v in (vectors or {}).items():
            self.add(w, v)

    def add(self, word: str, vec) -> None:
        vec = np.asarray(vec, dtype=np.float64)
        if vec.ndim != 1:
            raise VectorFormatError("vectors must be 1-D")
        if self.dim is None:
            self.dim = vec.shape[0]
        elif vec.shape[0] != self.dim:
            raise VectorFormatError(f"dimension {vec.shape[0]} != {self.dim} for {word!r}")
        if not np.all(np.isfinite(vec)):
            raise VectorFormatError(f"non-finite entry in vector for {word!r}")
        self._vecs[word] = vec

    def get(self, word: str) -> np.ndarray | None:
        return self._vecs.get(word)

    def __contains__(self, word) -> bool:
        return word in self._vecs

    def __len__(self) -> int:
        return len(self._vecs)

    def words(self) -> list[str]:
        return list(self._vecs)


def load_word_vectors(path, format: str = "text") -> VectorStore:
    """Read word2vec vectors in the text or the original binary layout."""
    path = Path(path)
    if format == "binary":
        return _load_binary(path)
    if format != "text":
        raise ValueError(f"unknown vector format {format!r}")
    store = VectorStore()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip().split(" ")
            if not parts or parts == [""]:
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                store.dim = int(parts[1])
                continue
            try:
                vec = [float(x) for x in parts[1:]]
            except ValueError:
                raise VectorFormatError(f"{path}:{lineno}: non-numeric component") from None
            try:
                store.add(parts[0], vec)
            except VectorFormatError as e:
                raise VectorFormatError(f"{path}:{lineno}: word #{len(store)}: {e}") from None
    return store


def _load_binary(path: Path) -> VectorStore:
    data = path.read_bytes()
    nl = data.find(b"\n")
    if nl < 0:
        raise VectorFormatError(f"{path}: missing header")
    try:
        vocab, dim = (int(x) for x in data[:nl].split())
    except ValueError:
        raise VectorFormatError(f"{path}: bad header {data[:nl]!r}") from None
    store = VectorStore(dim=dim)
    pos = nl + 1
    width = 4 * dim
    for idx in range(vocab):
        while pos < len(data) and data[pos : pos + 1] in (b"\n", b" "):
            pos += 1
        sp = data.find(b" ", pos)
        if sp < 0:
            raise VectorFormatError(f"{path}: truncated at word #{idx}")
        word = data[pos:sp].decode("utf-8", errors="replace")
        pos = sp + 1
        if pos + width > len(data):
            raise VectorFormatError(f"{path}: truncated vector at word #{idx} ({word!r})")
        store.add(word, np.frombuffer(data, dtype="<f4", count=dim, offset=pos).astype(np.float64))
        pos += width
    return store


def save_word_vectors(store: VectorStore, path, format: str = "text") -> None:
    words = store.words()
    if format == "binary":
        with open(path, "wb") as fh:
            fh.write(f"{len(words)} {store.dim}\n".encode())
            for w in words:
                fh.write(w.encode("utf-8") + b" ")
                fh.write(struct.pack(f"<{store.dim}f", *store.get(w)))
                fh.write(b"\n")
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(words)} {store.dim}\n")
        for w in words:
            fh.write(w + " " + " ".join(repr(float(x)) for x in store.get(w)) + "\n")


def phrase_vector(store: VectorStore, phrase: list[str]) -> np.ndarray | None:
    vecs = [store.get(t) for t in phrase if t in store]
    if not vecs:
        return None
    return np.mean(vecs, axis=0)


def semantic_distance(u, v) -> float:
    """``1 - cos(u, v)`` clamped to [0, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError("vectors differ in dimension")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ValueError("semantic distance undefined for a zero vector")
    return float(min(1.0, max(0.0, 1.0 - float(u @ v) / (nu * nv))))


class PrecomputedEmbeddings:
    """Opinion or concept id -> vector, read from ``id<TAB>v1<TAB>...``."""

    def __init__(self, vectors: dict[str, np.ndarray] | None = None):
        self.store = VectorStore(vectors)

    def get(self, key: str) -> np.ndarray | None:
        return self.store.get(key)

    def __contains__(self, key) -> bool:
        return key in self.store

    @classmethod
    def load(cls, path) -> "PrecomputedEmbeddings":
        emb = cls()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                parts = line.rstrip("\r\n").split("\t")
                if len(parts) < 2:
                    continue
                try:
                    emb.store.add(parts[0], [float(x) for x in parts[1:]])
                except (ValueError, VectorFormatError) as e:
                    raise VectorFormatError(f"{path}:{lineno}: {e}") from None
        return emb


# ---------------------------------------------------------------------------
# subject embedding providers used by the matcher


class WordVectorProvider:
    """Embeds a subject as the mean vector of its concept name, else of its mention surfaces."""

    def __init__(self, store: VectorStore):
        self.store = store

    def vector(self, subject) -> np.ndarray | None:
        from .corpus import tokenize

        name = [t.normalized for s in tokenize(subject.concept_id.replace("_", " ")) for t in s.tokens]
        vec = phrase_vector(self.store, name)
        if vec is None:
            surf = [t.normalized for m in subject.mentions for s in tokenize(m.surface) for t in s.tokens]
            vec = phrase_vector(self.store, surf)
        if vec is not None and not np.any(vec):
            return None
        return vec


class ConceptEmbeddingProvider:
    def __init__(self, embeddings: PrecomputedEmbeddings):
        self.embeddings = embeddings

    def vector(self, subject) -> np.ndarray | None:
        return self.embeddings.get(subject.concept_id)


class IdentityProvider:
    """No vectors: subjects match only on identical concept ids."""

    def vector(self, subject):
        return None


# ---------------------------------------------------------------------------
# TF-IDF


def load_stopwords(path=None) -> frozenset[str]:
    if path is None:
        from .lexicon import data_path

        path = data_path("stopwords.txt")
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip().lower() for line in fh if line.strip())


def content_terms(opinion: Opinion, stopwords) -> list[str]:
    return [t.normalized for t in opinion.tokens if t.normalized not in stopwords and any(c.isalnum() for c in t.normalized)]


@dataclass
class TfidfModel:
    vocabulary: dict[str, int]
    df: np.ndarray
    idf: np.ndarray
    stopwords: frozenset[str]
    matrix: np.ndarray  # opinions x vocabulary; dense, corpora here are small

    def cosine_distance(self, i: int, j: int) -> float:
        return cosine_distance(self.matrix[i], self.matrix[j])


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine distance for nonnegative vectors; two zero vectors are at distance 0, one zero vector at 1."""
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0 if nu == nv else 1.0
    return float(min(1.0, max(0.0, 1.0 - float(u @ v) / (nu * nv))))


def tfidf_vectors(dataset: Dataset, stopwords=frozenset()) -> TfidfModel:
    """Raw term counts times ``ln(N / df)``; stopwords dropped before counting."""
    stopwords = frozenset(stopwords)
    docs = [Counter(content_terms(op, stopwords)) for op in dataset.opinions]
    vocab: dict[str, int] = {}
    for doc in docs:
        for term in sorted(doc):
            vocab.setdefault(term, len(vocab))
    n = len(docs)
    df = np.zeros(len(vocab))
    tf = np.zeros((n, len(vocab)))
    for i, doc in enumerate(docs):
        for term, count in doc.items():
            tf[i, vocab[term]] = count
            df[vocab[term]] += 1
    idf = np.log(n / df) if len(vocab) else np.zeros(0)
    return TfidfModel(vocab, df, idf, stopwords, tf * idf)


# ---------------------------------------------------------------------------
# word mover's distance over whole texts


def text_wmd(o1: Opinion, o2: Opinion, store: VectorStore, stopwords=frozenset(), ground=semantic_distance) -> float | None:
    """Earth mover's distance between normalized term-frequency masses; None when a side is empty."""
    from .matching import transport

    c1 = Counter(t for t in content_terms(o1, stopwords) if t in store)
    c2 = Counter(t for t in content_terms(o2, stopwords) if t in store)
    if not c1 or not c2:
        return None
    w1, w2 = sorted(c1), sorted(c2)
    cost = np.array([[ground(store.get(a), store.get(b)) for b in w2] for a in w1])
    flow = transport(cost, [c1[w] for w in w1], [c2[w] for w in w2])
    return float(max(0.0, (flow * cost).sum()))
