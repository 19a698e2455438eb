"""Synthetic contrastive corpora: one shared bag of words, opposite subject polarities.

Every opinion is a rearrangement of the same multiset of tokens. Opinions
differ only in which subject sits next to the positive word and which next to
the negative one, so text-similarity measures see no difference between the
two stances while subject-level polarity separates them completely.
"""
from __future__ import annotations

import numpy as np

from .corpus import Dataset, Opinion
from .lexicon import SentimentLexicon
from .spotter import Gazetteer

SUBJECTS = (("video games", "Video_game"), ("parents", "Parent"))
POSITIVE = "good"
NEGATIVE = "bad"
VERBS = ("are", "seem")
FILLER = ("today", "really", "honestly", "at", "home", "lately")


def contrastive_resources() -> tuple[Gazetteer, SentimentLexicon]:
    """The 2-entry gazetteer and 2-word lexicon the generated corpora are built for."""
    gaz = Gazetteer()
    for surface, concept in SUBJECTS:
        gaz.add(surface, concept, 0.5)
    return gaz, SentimentLexicon({POSITIVE: 1.0, NEGATIVE: -1.0})


def make_contrastive_corpus(n_per_cluster: int = 20, seed: int = 0, negated_fraction: float = 0.0) -> Dataset:
    """``pro`` opinions praise the first subject and blame the second; ``con`` the reverse.

    A ``negated_fraction`` of each cluster states its polarities through
    negated opposites ("not bad" for positive, "not good" for negative). The
    negated opinions share their own bag of words, which is the same in both
    clusters.
    """
    rng = np.random.default_rng(seed)
    (s1, _), (s2, _) = SUBJECTS
    n_negated = int(round(negated_fraction * n_per_cluster))
    opinions = []
    for label, (liked, disliked) in (("pro", (s1, s2)), ("con", (s2, s1))):
        negated = np.zeros(n_per_cluster, dtype=bool)
        negated[rng.permutation(n_per_cluster)[:n_negated]] = True
        for t in range(n_per_cluster):
            if negated[t]:
                pos_expr, neg_expr = f"not {NEGATIVE}", f"not {POSITIVE}"
            else:
                pos_expr, neg_expr = POSITIVE, NEGATIVE
            filler = list(rng.permutation(FILLER))
            verbs = list(rng.permutation(VERBS))
            half = len(filler) // 2
            clauses = [
                f"{liked.capitalize()} {verbs[0]} {pos_expr} {' '.join(filler[:half])}.",
                f"{disliked.capitalize()} {verbs[1]} {neg_expr} {' '.join(filler[half:])}.",
            ]
            if rng.integers(2):
                clauses.reverse()
            opinions.append(Opinion.from_text(f"{label}-{t:03d}", " ".join(clauses), label))
    order = rng.permutation(len(opinions))
    return Dataset(name=f"contrastive-{seed}", opinions=tuple(opinions[i] for i in order))
