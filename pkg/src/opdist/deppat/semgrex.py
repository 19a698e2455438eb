"""A Semgrex-style dependency pattern language, restricted to what the bundled rules need.

Supported syntax::

    {}                      any node
    {tag:/VB.*/}            node attribute regex (tag, word, lemma); anchored
    {...}=OpSubject         named capture
    A >nsubj B              B is a child of A via relation "nsubj"
    A </nmod:of/ B          B is the parent of A, relation matched as regex
    A > B                   any relation
    A >r B >s C             relations chain on A (not on B)
    A >r (B >s C)           parenthesised node with its own relations
    A [ >r B | >s C ]       alternation of relation groups

Groups still open at end of input are closed implicitly.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from ..corpus import ParsedSentence

CAPTURE_NAMES = ("OpSubject", "OpExp1", "OpExp2")
NODE_KEYS = ("tag", "word", "lemma")
_RELN_CHARS = re.compile(r"[A-Za-z0-9_:.\-]")


class PatternSyntaxError(ValueError):
    def __init__(self, message: str, column: int, source: str = ""):
        super().__init__(f"column {column}: {message}" + (f" in {source!r}" if source else ""))
        self.column = column


@dataclass
class Relation:
    direction: str  # ">" child, "<" parent
    reln: str | None  # literal name, or None for any
    is_regex: bool
    target: "NodeSpec"

    def matches(self, label: str) -> bool:
        if self.reln is None:
            return True
        if self.is_regex:
            return re.fullmatch(self.reln, label) is not None
        return label == self.reln

    def to_source(self) -> str:
        if self.reln is None:
            rel = ""
        elif self.is_regex:
            rel = f"/{self.reln}/"
        else:
            rel = self.reln
        return f"{self.direction}{rel} {self.target.to_source(nested=True)}"


@dataclass
class Alternation:
    branches: list[list[Relation]]

    def to_source(self) -> str:
        return "[ " + " | ".join(" ".join(r.to_source() for r in b) for b in self.branches) + " ]"


@dataclass
class NodeSpec:
    constraints: dict[str, str] = field(default_factory=dict)
    name: str | None = None
    relations: list = field(default_factory=list)  # Relation | Alternation

    def accepts(self, tok) -> bool:
        for key, rx in self.constraints.items():
            value = {"tag": tok.tag, "word": tok.form, "lemma": tok.lemma}[key]
            if re.fullmatch(rx, value) is None:
                return False
        return True

    def to_source(self, nested: bool = False) -> str:
        inner = ",".join(f"{k}:/{v}/" for k, v in self.constraints.items())
        s = "{" + inner + "}"
        if self.name:
            s += "=" + self.name
        if self.relations:
            s += " " + " ".join(r.to_source() for r in self.relations)
            if nested:
                s = "(" + s + ")"
        return s


@dataclass
class DepPattern:
    root: NodeSpec
    source: str

    def serialize(self) -> str:
        return self.root.to_source()

    @property
    def alternations(self) -> int:
        def count(spec: NodeSpec) -> int:
            n = 0
            for r in spec.relations:
                if isinstance(r, Alternation):
                    n += 1
                    n += sum(count(x.target) for b in r.branches for x in b)
                else:
                    n += count(r.target)
            return n

        return count(self.root)

    @property
    def capture_names(self) -> set[str]:
        names = set()

        def walk(spec: NodeSpec):
            if spec.name:
                names.add(spec.name)
            for r in spec.relations:
                rels = [x for b in r.branches for x in b] if isinstance(r, Alternation) else [r]
                for x in rels:
                    walk(x.target)

        walk(self.root)
        return names


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0

    def error(self, msg: str, pos: int | None = None):
        raise PatternSyntaxError(msg, (self.pos if pos is None else pos) + 1, self.src)

    def ws(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self) -> NodeSpec:
        spec = self.node_expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return spec

    def node_expr(self) -> NodeSpec:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            spec = self.node_expr()
            if self.peek() == ")":
                self.pos += 1
            elif self.peek():
                self.error("expected ')'")
            # unclosed group at end of input: closed implicitly
            return spec
        spec = self.node_desc()
        spec.relations = self.relations()
        return spec

    def node_desc(self) -> NodeSpec:
        self.expect("{")
        constraints = {}
        while self.peek() != "}":
            if not self.peek():
                self.error("unterminated node description")
            start = self.pos
            m = re.compile(r"[A-Za-z]+").match(self.src, self.pos)
            if not m:
                self.error(f"unexpected {self.peek()!r} in node description")
            key = m.group(0)
            if key not in NODE_KEYS:
                self.error(f"unknown node attribute {key!r}", start)
            self.pos = m.end()
            self.expect(":")
            constraints[key] = self.regex()
            if self.peek() == ",":
                self.pos += 1
        self.pos += 1
        name = None
        if self.pos < len(self.src) and self.src[self.pos] == "=":
            self.pos += 1
            m = re.compile(r"\w+").match(self.src, self.pos)
            if not m:
                self.error("expected capture name")
            name = m.group(0)
            if name not in CAPTURE_NAMES:
                self.error(f"capture name {name!r} not one of {', '.join(CAPTURE_NAMES)}")
            self.pos = m.end()
        return NodeSpec(constraints, name)

    def regex(self) -> str:
        self.expect("/")
        start = self.pos
        while self.pos < len(self.src) and self.src[self.pos] != "/":
            self.pos += 2 if self.src[self.pos] == "\\" else 1
        if self.pos >= len(self.src):
            self.error("unterminated regex", start - 1)
        rx = self.src[start : self.pos]
        self.pos += 1
        try:
            re.compile(rx)
        except re.error as e:
            self.error(f"bad regex: {e}", start)
        return rx

    def relations(self) -> list:
        rels = []
        while True:
            ch = self.peek()
            if ch in (">", "<"):
                rels.append(self.relation())
            elif ch == "[":
                rels.append(self.alternation())
            else:
                return rels

    def relation(self) -> Relation:
        direction = self.src[self.pos]
        self.pos += 1
        reln, is_regex = None, False
        if self.pos < len(self.src) and self.src[self.pos] == "/":
            reln, is_regex = self.regex(), True
        else:
            start = self.pos
            while self.pos < len(self.src) and _RELN_CHARS.match(self.src[self.pos]):
                self.pos += 1
            if self.pos > start:
                reln = self.src[start : self.pos]
        ch = self.peek()
        if ch not in ("{", "("):
            self.error("expected node description after relation")
        target = self.node_expr() if ch == "(" else self.node_desc()
        return Relation(direction, reln, is_regex, target)

    def alternation(self) -> Alternation:
        self.expect("[")
        branches = [[]]
        while True:
            ch = self.peek()
            if ch in (">", "<"):
                branches[-1].append(self.relation())
            elif ch == "|":
                self.pos += 1
                branches.append([])
            elif ch == "]":
                self.pos += 1
                break
            elif not ch:
                break  # closed implicitly
            else:
                self.error(f"unexpected {ch!r} in alternation")
        if any(not b for b in branches):
            self.error("empty alternation branch")
        return Alternation(branches)


def compile_pattern(src: str) -> DepPattern:
    return DepPattern(_Parser(src).parse(), src)


def load_rules(path=None) -> list[DepPattern]:
    """One pattern per non-empty line; defaults to the bundled 14 rules."""
    if path is None:
        from ..lexicon import data_path

        path = data_path("semregex_rules.txt")
    rules = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip() and not line.lstrip().startswith("#"):
            rules.append(compile_pattern(line.strip()))
    return rules


# ---------------------------------------------------------------------------
# matching


def _match_node(spec: NodeSpec, tree: ParsedSentence, node: int, binding: dict):
    tok = tree.node(node)
    if not spec.accepts(tok):
        return
    if spec.name:
        bound = binding.get(spec.name)
        if bound is not None and bound != node:
            return
        binding = {**binding, spec.name: node}
    yield from _match_relations(spec.relations, tree, node, binding)


def _match_relations(rels: list, tree: ParsedSentence, node: int, binding: dict):
    if not rels:
        yield binding
        return
    first, rest = rels[0], rels[1:]
    if isinstance(first, Alternation):
        for branch in first.branches:
            for b in _match_relations(branch, tree, node, binding):
                yield from _match_relations(rest, tree, node, b)
        return
    for b in _match_relation(first, tree, node, binding):
        yield from _match_relations(rest, tree, node, b)


def _match_relation(rel: Relation, tree: ParsedSentence, node: int, binding: dict):
    if rel.direction == ">":
        for child in tree.children(node):
            if rel.matches(child.deprel):
                yield from _match_node(rel.target, tree, child.index, binding)
    else:
        tok = tree.node(node)
        if tok.head != 0 and rel.matches(tok.deprel):
            yield from _match_node(rel.target, tree, tok.head, binding)


def match_pattern(pattern: DepPattern, tree: ParsedSentence) -> list[dict[str, int]]:
    """All capture maps (name -> 1-based token index), deduplicated, ordered by root node."""
    out = []
    seen = set()
    for root in range(1, len(tree) + 1):
        for binding in _match_node(pattern.root, tree, root, {}):
            key = frozenset(binding.items())
            if key not in seen:
                seen.add(key)
                out.append(dict(sorted(binding.items())))
    return out
