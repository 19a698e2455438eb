"""Concept spotting: a local gazetteer spotter and a cached TagMe REST client."""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .corpus import Opinion, tokenize

log = logging.getLogger(__name__)

DEFAULT_LP_THRESHOLD = 0.03
MAX_SURFACE_TOKENS = 6


class SpotterError(RuntimeError):
    pass


@dataclass(frozen=True)
class SubjectMention:
    opinion_id: str
    sentence: int
    span: tuple[int, int]  # token offsets within the sentence, end exclusive
    surface: str
    concept_id: str
    link_probability: float


@dataclass(frozen=True)
class OpinionSubject:
    concept_id: str
    mentions: tuple[SubjectMention, ...]

    @property
    def phrase(self) -> str:
        return self.mentions[0].surface if self.mentions else self.concept_id


class Gazetteer:
    """Surface phrase -> candidate concepts sorted by descending link probability."""

    def __init__(self, entries: dict[str, list[tuple[str, float]]] | None = None):
        self._entries: dict[tuple[str, ...], list[tuple[str, float]]] = {}
        self.max_len = 0
        for surface, cands in (entries or {}).items():
            for cid, lp in cands:
                self.add(surface, cid, lp)

    def add(self, surface: str, concept_id: str, link_probability: float) -> None:
        if not 0.0 <= link_probability <= 1.0:
            raise ValueError(f"link probability {link_probability} outside [0, 1]")
        key = tuple(t.normalized for s in tokenize(surface) for t in s.tokens)
        if not key:
            raise ValueError("empty gazetteer surface")
        if len(key) > MAX_SURFACE_TOKENS:
            raise ValueError(f"surface {surface!r} longer than {MAX_SURFACE_TOKENS} tokens")
        cands = [c for c in self._entries.get(key, []) if c[0] != concept_id]
        cands.append((concept_id, float(link_probability)))
        cands.sort(key=lambda c: (-c[1], c[0]))
        self._entries[key] = cands
        self.max_len = max(self.max_len, len(key))

    def candidates(self, words) -> list[tuple[str, float]]:
        return self._entries.get(tuple(words), [])

    def best(self, words) -> tuple[str, float] | None:
        cands = self.candidates(words)
        return cands[0] if cands else None

    def __contains__(self, words) -> bool:
        return tuple(words) in self._entries

    def __len__(self):
        return len(self._entries)

    @classmethod
    def load(cls, path) -> "Gazetteer":
        """Read ``surface<TAB>concept_id<TAB>link_probability`` lines."""
        gaz = cls()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\r\n")
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise SpotterError(f"{path}:{lineno}: expected 3 tab-separated columns")
                try:
                    gaz.add(parts[0], parts[1], float(parts[2]))
                except ValueError as e:
                    raise SpotterError(f"{path}:{lineno}: {e}") from None
        return gaz


def longest_match_spans(gaz: Gazetteer, words: list[str]) -> list[tuple[int, int]]:
    """Greedy left-to-right longest-match spans over ``words`` (non-overlapping)."""
    spans = []
    i = 0
    n = len(words)
    while i < n:
        for length in range(min(gaz.max_len, n - i), 0, -1):
            if tuple(words[i : i + length]) in gaz:
                spans.append((i, i + length))
                i += length
                break
        else:
            i += 1
    return spans


def group_mentions(mentions: list[SubjectMention]) -> list[OpinionSubject]:
    """Merge mentions by concept id, ordered by first occurrence."""
    by_concept: dict[str, list[SubjectMention]] = {}
    for m in mentions:
        by_concept.setdefault(m.concept_id, []).append(m)
    return [OpinionSubject(cid, tuple(ms)) for cid, ms in by_concept.items()]


def spot(gaz: Gazetteer, opinion: Opinion, lp_threshold: float = DEFAULT_LP_THRESHOLD) -> list[OpinionSubject]:
    """Spot opinion subjects in ``opinion``.

    Spans are chosen by longest match independently of the threshold; a span
    whose best candidate falls below ``lp_threshold`` is consumed but dropped,
    so raising the threshold can only remove subjects.
    """
    if not 0.0 <= lp_threshold <= 1.0:
        raise ValueError("lp_threshold must lie in [0, 1]")
    mentions = []
    for sent in opinion.sentences:
        words = sent.words
        for start, end in longest_match_spans(gaz, words):
            cid, lp = gaz.best(words[start:end])
            if lp < lp_threshold:
                continue
            surface = " ".join(t.surface for t in sent.tokens[start:end])
            mentions.append(SubjectMention(opinion.id, sent.index, (start, end), surface, cid, lp))
    return group_mentions(mentions)


# ---------------------------------------------------------------------------
# TagMe


@dataclass
class TagMeConfig:
    token: str | None = None
    endpoint: str = "https://tagme.d4science.org/tagme/tag"
    lang: str = "en"
    cache_dir: str | os.PathLike | None = None
    attempts: int = 3
    backoff: float = 1.0
    timeout: float = 30.0
    max_in_flight: int = 4


class TagMeClient:
    def __init__(self, config: TagMeConfig, session=None):
        self.config = config
        if session is None:
            import requests

            session = requests.Session()
        self.session = session
        self._sleep = time.sleep

    def _cache_file(self, text: str) -> Path | None:
        if self.config.cache_dir is None:
            return None
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        return Path(self.config.cache_dir) / f"{digest}.json"

    def fetch(self, text: str) -> dict:
        """Raw TagMe JSON for ``text``, from the disk cache when present."""
        cache = self._cache_file(text)
        if cache is not None and cache.exists():
            with open(cache, encoding="utf-8") as fh:
                return json.load(fh)
        if not self.config.token:
            raise SpotterError("TagMe token not configured")
        params = {"gcube-token": self.config.token, "lang": self.config.lang, "text": text}
        status = None
        for attempt in range(self.config.attempts):
            resp = self.session.get(self.config.endpoint, params=params, timeout=self.config.timeout)
            status = resp.status_code
            if status == 200:
                try:
                    data = resp.json()
                except ValueError as e:
                    raise SpotterError(f"malformed JSON from {self.config.endpoint}") from e
                if not isinstance(data, dict):
                    raise SpotterError(f"malformed JSON from {self.config.endpoint}")
                if cache is not None:
                    _atomic_write_json(cache, data)
                return data
            if attempt + 1 < self.config.attempts:
                self._sleep(self.config.backoff * 2**attempt)
        raise SpotterError(
            f"TagMe request to {self.config.endpoint} failed after {self.config.attempts} attempts (HTTP {status})"
        )

    def annotate(self, text: str, opinion_id: str = "") -> list[SubjectMention]:
        return annotations_to_mentions(self.fetch(text), text, opinion_id)

    def annotate_many(self, items: list[tuple[str, str]]) -> list[list[SubjectMention]]:
        """Annotate ``(opinion_id, text)`` pairs with at most ``max_in_flight`` concurrent requests."""
        with ThreadPoolExecutor(max_workers=max(1, self.config.max_in_flight)) as pool:
            return list(pool.map(lambda it: self.annotate(it[1], it[0]), items))


def tagme_annotate(config: TagMeConfig, text: str, session=None, opinion_id: str = "") -> list[SubjectMention]:
    return TagMeClient(config, session).annotate(text, opinion_id)


def _atomic_write_json(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        json.dump(data, fh, sort_keys=True)
    os.replace(tmp, path)


def annotations_to_mentions(data: dict, text: str, opinion_id: str = "") -> list[SubjectMention]:
    """Map TagMe annotations onto token spans of ``text``."""
    anns = data.get("annotations")
    if not isinstance(anns, list):
        raise SpotterError("TagMe response lacks an 'annotations' list")
    sentences = tokenize(text)
    out = []
    for ann in anns:
        try:
            spot_text = ann["spot"]
            title = ann["title"]
            lp = float(ann["link_probability"])
        except (KeyError, TypeError, ValueError) as e:
            raise SpotterError(f"malformed TagMe annotation {ann!r}") from e
        start = ann.get("start")
        if start is None:
            start = text.lower().find(spot_text.lower())
            if start < 0:
                continue
        end = ann.get("end", start + len(spot_text))
        loc = _char_to_tokens(sentences, int(start), int(end))
        if loc is None:
            continue
        sent_idx, span = loc
        out.append(SubjectMention(opinion_id, sent_idx, span, spot_text, title, lp))
    return out


def _char_to_tokens(sentences, start: int, end: int):
    for sent in sentences:
        idx = [i for i, t in enumerate(sent.tokens) if t.char_span[0] < end and t.char_span[1] > start]
        if idx:
            return sent.index, (idx[0], idx[-1] + 1)
    return None


def spot_tagme(mentions: list[SubjectMention], lp_threshold: float = DEFAULT_LP_THRESHOLD) -> list[OpinionSubject]:
    return group_mentions([m for m in mentions if m.link_probability >= lp_threshold])
