from __future__ import annotations

from dataclasses import dataclass

from ..corpus import ParsedSentence
from .nounphrase import extract_noun_phrases
from .semgrex import DepPattern, match_pattern

NEGATION_RELATIONS = frozenset({"neg"})


@dataclass(frozen=True)
class ParseExtraction:
    span: tuple[int, int]  # 0-based, end exclusive
    subject: str
    head: int  # 1-based token index of the span head
    expression: tuple[tuple[int, bool], ...]  # (1-based token index, negated)

    def expression_words(self, tree: ParsedSentence) -> list[tuple[str, bool]]:
        return [(tree.node(i).form, neg) for i, neg in self.expression]


def span_head(tree: ParsedSentence, span: tuple[int, int]) -> int:
    """1-based index of the token in ``span`` whose head lies outside it (the last such, if several)."""
    inside = range(span[0] + 1, span[1] + 1)
    heads = [i for i in inside if tree.node(i).head not in inside]
    return heads[-1] if heads else inside[-1]


def is_negated(tree: ParsedSentence, index: int) -> bool:
    return any(c.deprel in NEGATION_RELATIONS for c in tree.children(index))


def extract_parse_expressions(
    tree: ParsedSentence, rules: list[DepPattern], np_spans: list[tuple[int, int]] | None = None
) -> list[ParseExtraction]:
    """One extraction per noun-phrase span; the expression collects every OpExp binding
    of rule matches whose OpSubject is the span head."""
    if np_spans is None:
        np_spans = extract_noun_phrases(tree)
    bound: dict[int, set[int]] = {}
    for rule in rules:
        for cap in match_pattern(rule, tree):
            subj = cap.get("OpSubject")
            if subj is None:
                continue
            exprs = bound.setdefault(subj, set())
            for name in ("OpExp1", "OpExp2"):
                if name in cap:
                    exprs.add(cap[name])
    out = []
    for span in np_spans:
        head = span_head(tree, span)
        expr = sorted(bound.get(head, ()))
        out.append(
            ParseExtraction(
                span=span,
                subject=" ".join(t.form for t in tree.tokens[span[0] : span[1]]),
                head=head,
                expression=tuple((i, is_negated(tree, i)) for i in expr),
            )
        )
    return out
