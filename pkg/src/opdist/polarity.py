"""Polarity expressed toward each opinion subject."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import Opinion, ParsedSentence
from .deppat import extract_noun_phrases, extract_parse_expressions
from .lexicon import SentimentLexicon, ShifterSet, shifter_hits
from .spotter import OpinionSubject, SubjectMention

MODES = ("discrete", "continuous", "distribution")
VARIANTS = ("od", "od-parse")
NEUTRAL_BAND = 0.1


@dataclass(frozen=True)
class WeightedWord:
    word: str
    score: float
    distance: int
    shifted: bool = False

    def __post_init__(self):
        if self.distance < 1:
            raise ValueError("token distance must be >= 1")

    @property
    def weight(self) -> float:
        return 1.0 / math.sqrt(self.distance)

    @property
    def contribution(self) -> float:
        c = self.score * self.weight
        return -c if self.shifted else c


@dataclass(frozen=True)
class SubjectPolarity:
    mode: str
    value: float | None = None
    distribution: tuple[float, float, float] | None = None  # (neg, neu, pos)

    @property
    def payload(self):
        return self.distribution if self.mode == "distribution" else self.value

    def to_json(self):
        return {"mode": self.mode, "value": list(self.distribution) if self.mode == "distribution" else self.value}


@dataclass(frozen=True)
class OpinionRepresentation:
    opinion_id: str
    items: tuple[tuple[OpinionSubject, SubjectPolarity], ...] = ()

    def __len__(self):
        return len(self.items)

    @property
    def subjects(self) -> list[OpinionSubject]:
        return [s for s, _ in self.items]

    @property
    def polarities(self) -> list[SubjectPolarity]:
        return [p for _, p in self.items]


@dataclass(frozen=True)
class RepresentConfig:
    variant: str = "od"
    polarity: str = "discrete"
    shifters: bool = True
    shifter_scope: str = "local"  # "local": within `shifter_window` preceding tokens; "sentence"
    shifter_window: int = 3

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.polarity not in MODES:
            raise ValueError(f"polarity must be one of {MODES}")
        if self.shifter_scope not in ("local", "sentence"):
            raise ValueError("shifter_scope must be 'local' or 'sentence'")


def _is_shifted(hits: list[int], i: int, scope: str, window: int) -> bool:
    if scope == "sentence":
        return any(h != i for h in hits)
    return any(i - window <= h < i for h in hits)


def expression_window(
    opinion: Opinion,
    subject: OpinionSubject,
    lexicon: SentimentLexicon,
    shifters: ShifterSet | None = None,
    scope: str = "local",
    window: int = 3,
) -> list[WeightedWord]:
    """Lexicon words sharing a sentence with any mention of ``subject``.

    The subject's own tokens are excluded. A word near several mentions is
    counted once, at its smallest distance to a mention edge.
    """
    by_sentence: dict[int, list[SubjectMention]] = {}
    for m in subject.mentions:
        by_sentence.setdefault(m.sentence, []).append(m)
    words = []
    for sidx in sorted(by_sentence):
        sent = opinion.sentences[sidx]
        mentions = by_sentence[sidx]
        inside = {i for m in mentions for i in range(*m.span)}
        hits = shifter_hits(shifters, sent) if shifters else []
        for i, tok in enumerate(sent.tokens):
            if i in inside:
                continue
            score = lexicon.get(tok.normalized)
            if score is None:
                continue
            d = min(m.span[0] - i if i < m.span[0] else i - (m.span[1] - 1) for m in mentions)
            words.append(WeightedWord(tok.normalized, score, d, _is_shifted(hits, i, scope, window)))
    return words


def subject_polarity_continuous(words: list[WeightedWord]) -> float:
    p = sum(w.contribution for w in words if w.contribution > 0)
    n = -sum(w.contribution for w in words if w.contribution < 0)
    return (p - n) / (p + n + 1.0)


def discretize(score: float) -> int:
    return -1 if score < 0 else 1


def subject_polarity_distribution(words: list[WeightedWord]) -> tuple[float, float, float]:
    mass = [0.0, 0.0, 0.0]
    for w in words:
        c = w.contribution
        bucket = 0 if c < -NEUTRAL_BAND else 2 if c > NEUTRAL_BAND else 1
        mass[bucket] += abs(w.score) * w.weight
    total = sum(mass)
    if total <= 0:
        return (0.0, 1.0, 0.0)
    return (mass[0] / total, mass[1] / total, mass[2] / total)


def polarity_of(words: list[WeightedWord], mode: str) -> SubjectPolarity:
    if mode == "distribution":
        return SubjectPolarity(mode, distribution=subject_polarity_distribution(words))
    score = subject_polarity_continuous(words)
    if mode == "discrete":
        return SubjectPolarity(mode, value=float(discretize(score)))
    return SubjectPolarity(mode, value=score)


def represent_od(
    opinion: Opinion,
    subjects: list[OpinionSubject],
    lexicon: SentimentLexicon,
    shifters: ShifterSet | None,
    config: RepresentConfig = RepresentConfig(),
) -> OpinionRepresentation:
    active = shifters if config.shifters else None
    items = []
    for subj in subjects:
        words = expression_window(opinion, subj, lexicon, active, config.shifter_scope, config.shifter_window)
        items.append((subj, polarity_of(words, config.polarity)))
    return OpinionRepresentation(opinion.id, tuple(items))


def parse_subjects(
    opinion_id: str, trees: list[ParsedSentence], rules, lexicon: SentimentLexicon, use_negation: bool = True
) -> list[tuple[OpinionSubject, list[WeightedWord]]]:
    """Noun-phrase subjects with their rule-bound expression words (distance fixed at 1)."""
    grouped: dict[str, tuple[list[SubjectMention], list[WeightedWord]]] = {}
    for sidx, tree in enumerate(trees):
        for ext in extract_parse_expressions(tree, rules, extract_noun_phrases(tree)):
            key = ext.subject.lower()
            mention = SubjectMention(opinion_id, sidx, ext.span, ext.subject, key, 1.0)
            mentions, words = grouped.setdefault(key, ([], []))
            mentions.append(mention)
            for idx, negated in ext.expression:
                form = tree.node(idx).form.lower()
                score = lexicon.get(form)
                if score is not None:
                    words.append(WeightedWord(form, score, 1, negated and use_negation))
    return [(OpinionSubject(k, tuple(ms)), ws) for k, (ms, ws) in grouped.items()]


def represent_od_parse(
    opinion_id: str,
    trees: list[ParsedSentence],
    rules,
    lexicon: SentimentLexicon,
    config: RepresentConfig = RepresentConfig(variant="od-parse"),
) -> OpinionRepresentation:
    items = [
        (subj, polarity_of(words, config.polarity))
        for subj, words in parse_subjects(opinion_id, trees, rules, lexicon, config.shifters)
    ]
    return OpinionRepresentation(opinion_id, tuple(items))


def represent_opinion(
    opinion: Opinion,
    subjects=None,
    config: RepresentConfig = RepresentConfig(),
    *,
    lexicon: SentimentLexicon,
    shifters: ShifterSet | None = None,
    trees: list[ParsedSentence] | None = None,
    rules=None,
) -> OpinionRepresentation:
    if config.variant == "od-parse":
        if trees is None or rules is None:
            raise ValueError("od-parse needs parsed trees and rules")
        return represent_od_parse(opinion.id, trees, rules, lexicon, config)
    return represent_od(opinion, subjects or [], lexicon, shifters, config)


def representation_to_json(rep: OpinionRepresentation) -> dict:
    return {
        "id": rep.opinion_id,
        "subjects": [
            {
                "concept": subj.concept_id,
                "polarity": pol.to_json(),
                "mentions": [
                    {"sentence": m.sentence, "span": list(m.span), "surface": m.surface, "lp": m.link_probability}
                    for m in subj.mentions
                ],
            }
            for subj, pol in rep.items
        ],
    }


def representation_from_json(rec: dict) -> OpinionRepresentation:
    items = []
    for s in rec["subjects"]:
        mentions = tuple(
            SubjectMention(rec["id"], m["sentence"], tuple(m["span"]), m["surface"], s["concept"], m["lp"])
            for m in s["mentions"]
        )
        pol = s["polarity"]
        if pol["mode"] == "distribution":
            sp = SubjectPolarity("distribution", distribution=tuple(pol["value"]))
        else:
            sp = SubjectPolarity(pol["mode"], value=pol["value"])
        items.append((OpinionSubject(s["concept"], mentions), sp))
    return OpinionRepresentation(rec["id"], tuple(items))
