"""Word-level sentiment scores and polarity shifters."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .corpus import Sentence, Token

log = logging.getLogger(__name__)

DEFAULT_LEXICON = "lexicon.tsv"
DEFAULT_SHIFTERS = "shifters.txt"


class LexiconError(ValueError):
    pass


def data_path(name: str) -> Path:
    """Path of a file bundled in ``opdist/data``."""
    return Path(str(resources.files("opdist") / "data" / name))


@dataclass(frozen=True)
class SentimentLexicon:
    scores: dict[str, float]
    overrides: int = 0

    def __post_init__(self):
        for w, s in self.scores.items():
            if not -1.0 <= s <= 1.0:
                raise LexiconError(f"score for {w!r} outside [-1, 1]: {s}")

    def __contains__(self, word: str) -> bool:
        return word in self.scores

    def __len__(self) -> int:
        return len(self.scores)

    def get(self, word: str) -> float | None:
        return self.scores.get(word.lower())


def load_sentiment_lexicon(path=None) -> SentimentLexicon:
    """Read a ``word<TAB>score`` file. Later duplicates win; the count is kept in ``overrides``."""
    path = Path(path) if path is not None else data_path(DEFAULT_LEXICON)
    scores: dict[str, float] = {}
    overrides = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise LexiconError(f"{path}:{lineno}: expected word<TAB>score")
            word, raw = parts[0].strip().lower(), parts[1].strip()
            try:
                score = float(raw)
            except ValueError:
                if lineno == 1 and raw.lower() == "score":
                    continue  # header
                raise LexiconError(f"{path}:{lineno}: bad score {raw!r}") from None
            if not -1.0 <= score <= 1.0:
                raise LexiconError(f"{path}:{lineno}: score {score} outside [-1, 1]")
            if word in scores:
                overrides += 1
            scores[word] = score
    if overrides:
        log.warning("%s: %d duplicate entries overridden", path, overrides)
    return SentimentLexicon(scores, overrides)


def word_polarity(lex: SentimentLexicon, token: Token | str) -> float | None:
    word = token if isinstance(token, str) else token.normalized
    return lex.get(word)


@dataclass(frozen=True)
class ShifterSet:
    phrases: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(
            self, "phrases", frozenset(" ".join(p.lower().split()) for p in self.phrases if p.strip())
        )
        # longest phrases first so that "higher than" wins over any 1-token prefix
        seqs = sorted({tuple(p.split()) for p in self.phrases}, key=lambda t: (-len(t), t))
        object.__setattr__(self, "_seqs", tuple(seqs))

    def __len__(self) -> int:
        return len(self.phrases)

    def __contains__(self, phrase: str) -> bool:
        return phrase in self.phrases


def load_shifters(path=None) -> ShifterSet:
    path = Path(path) if path is not None else data_path(DEFAULT_SHIFTERS)
    with open(path, encoding="utf-8") as fh:
        return ShifterSet(frozenset(line.strip() for line in fh if line.strip()))


def shifter_hits(shifters: ShifterSet, sentence: Sentence | list[str]) -> list[int]:
    """Token positions where a shifter phrase starts, matched longest-first and non-overlapping."""
    words = sentence.words if isinstance(sentence, Sentence) else [w.lower() for w in sentence]
    hits = []
    i = 0
    while i < len(words):
        for seq in shifters._seqs:
            if tuple(words[i : i + len(seq)]) == seq:
                hits.append(i)
                i += len(seq)
                break
        else:
            i += 1
    return hits
