"""Token-level regular expressions over POS tags, used for noun-phrase chunking.

Pattern syntax: ``<NN.*>`` matches a token whose tag fully matches the regex;
``<(OF|THE|IN)>`` is a literal alternation matching the word
(case-insensitive) or the tag. Elements and parenthesised groups take the
quantifiers ``?``, ``+`` and ``*``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

NOUN_PHRASE_RULE = r"(<NN.*><POS>?)+<(OF|THE|IN)>?((<NN.*><POS>?))+"

_LITERAL_ALT = re.compile(r"^\(\s*[A-Za-z'\-]+(\s*\|\s*[A-Za-z'\-]+)*\s*\)$")


@dataclass(frozen=True)
class Element:
    tag_regex: str | None = None
    words: frozenset[str] | None = None

    def accepts(self, word: str, tag: str) -> bool:
        if self.words is not None:
            return word.lower() in self.words or tag.upper() in {w.upper() for w in self.words}
        return re.fullmatch(self.tag_regex, tag) is not None


class PosPatternError(ValueError):
    pass


# AST nodes: ("el", Element) | ("seq", [nodes]) | ("alt", [nodes]) | ("rep", node, min, max_or_None)


class _Parser:
    def __init__(self, src: str):
        self.src = re.sub(r"\s+", "", src)
        self.pos = 0

    def parse(self):
        node = self.alt()
        if self.pos != len(self.src):
            raise PosPatternError(f"unexpected {self.src[self.pos]!r} at {self.pos + 1}")
        return node

    def alt(self):
        branches = [self.seq()]
        while self.pos < len(self.src) and self.src[self.pos] == "|":
            self.pos += 1
            branches.append(self.seq())
        return branches[0] if len(branches) == 1 else ("alt", branches)

    def seq(self):
        items = []
        while self.pos < len(self.src) and self.src[self.pos] not in ")|":
            items.append(self.quantified())
        if not items:
            raise PosPatternError(f"empty sequence at {self.pos + 1}")
        return items[0] if len(items) == 1 else ("seq", items)

    def quantified(self):
        atom = self.atom()
        while self.pos < len(self.src) and self.src[self.pos] in "?+*":
            q = self.src[self.pos]
            self.pos += 1
            if q != "?" and _nullable(atom):
                raise PosPatternError("quantified sub-pattern can match the empty sequence")
            atom = ("rep", atom, 0 if q in "?*" else 1, 1 if q == "?" else None)
        return atom

    def atom(self):
        ch = self.src[self.pos]
        if ch == "<":
            end = self.src.find(">", self.pos)
            if end < 0:
                raise PosPatternError(f"unterminated element at {self.pos + 1}")
            body = self.src[self.pos + 1 : end]
            self.pos = end + 1
            if _LITERAL_ALT.match(body):
                words = frozenset(w.strip().lower() for w in body.strip("()").split("|"))
                return ("el", Element(words=words))
            try:
                re.compile(body)
            except re.error as e:
                raise PosPatternError(f"bad tag regex {body!r}: {e}") from None
            return ("el", Element(tag_regex=body))
        if ch == "(":
            self.pos += 1
            node = self.alt()
            if self.pos >= len(self.src) or self.src[self.pos] != ")":
                raise PosPatternError(f"missing ')' at {self.pos + 1}")
            self.pos += 1
            return node
        raise PosPatternError(f"unexpected {ch!r} at {self.pos + 1}")


def _nullable(node) -> bool:
    kind = node[0]
    if kind == "el":
        return False
    if kind == "seq":
        return all(_nullable(n) for n in node[1])
    if kind == "alt":
        return any(_nullable(n) for n in node[1])
    return node[2] == 0 or _nullable(node[1])


class PosPattern:
    """Compiled to a Thompson NFA; :meth:`longest_match` simulates it over token streams."""

    def __init__(self, src: str):
        self.source = src
        self._eps: list[list[int]] = []
        self._step: list[tuple[Element, int] | None] = []
        start, accept = self._build(_Parser(src).parse())
        self.start, self.accept = start, accept

    def _state(self) -> int:
        self._eps.append([])
        self._step.append(None)
        return len(self._eps) - 1

    def _build(self, node) -> tuple[int, int]:
        kind = node[0]
        if kind == "el":
            s, e = self._state(), self._state()
            self._step[s] = (node[1], e)
            return s, e
        if kind == "seq":
            s, e = self._build(node[1][0])
            for child in node[1][1:]:
                cs, ce = self._build(child)
                self._eps[e].append(cs)
                e = ce
            return s, e
        if kind == "alt":
            s, e = self._state(), self._state()
            for child in node[1]:
                cs, ce = self._build(child)
                self._eps[s].append(cs)
                self._eps[ce].append(e)
            return s, e
        _, child, lo, hi = node
        s, e = self._state(), self._state()
        cs, ce = self._build(child)
        self._eps[s].append(cs)
        if lo == 0:
            self._eps[s].append(e)
        self._eps[ce].append(e)
        if hi is None:
            self._eps[ce].append(cs)
        return s, e

    def _closure(self, states) -> set[int]:
        stack = list(states)
        seen = set(stack)
        while stack:
            for nxt in self._eps[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    def longest_match(self, words, tags, start: int) -> int:
        """End index of the longest match beginning at ``start``; ``start`` itself if none."""
        current = self._closure([self.start])
        best = start if self.accept in current else -1
        i = start
        while current and i < len(tags):
            moved = set()
            for s in current:
                step = self._step[s]
                if step is not None and step[0].accepts(words[i], tags[i]):
                    moved.add(step[1])
            current = self._closure(moved)
            i += 1
            if self.accept in current:
                best = i
        return best

    def finditer(self, words, tags) -> list[tuple[int, int]]:
        """Leftmost-longest non-overlapping non-empty matches."""
        spans = []
        i = 0
        while i < len(tags):
            end = self.longest_match(words, tags, i)
            if end > i:
                spans.append((i, end))
                i = end
            else:
                i += 1
        return spans


def _ner_spans(ner: list[str | None]) -> list[tuple[int, int]]:
    spans = []
    i = 0
    while i < len(ner):
        if ner[i]:
            j = i + 1
            while j < len(ner) and ner[j] == ner[i]:
                j += 1
            spans.append((i, j))
            i = j
        else:
            i += 1
    return spans


_DEFAULT = None


def extract_noun_phrases(sent, pattern: PosPattern | None = None) -> list[tuple[int, int]]:
    """0-based, end-exclusive token spans of noun phrases and named entities in ``sent``."""
    global _DEFAULT
    if pattern is None:
        if _DEFAULT is None:
            _DEFAULT = PosPattern(NOUN_PHRASE_RULE)
        pattern = _DEFAULT
    words = [t.form for t in sent.tokens]
    tags = [t.tag for t in sent.tokens]
    candidates = pattern.finditer(words, tags) + _ner_spans([t.ner for t in sent.tokens])
    chosen: list[tuple[int, int]] = []
    for s, e in sorted(set(candidates), key=lambda sp: (sp[0] - sp[1], sp[0])):
        if all(e <= cs or s >= ce for cs, ce in chosen):
            chosen.append((s, e))
    return sorted(chosen)
