"""Noun-phrase chunking and dependency-pattern extraction for the parse-tree representation."""
from .extract import ParseExtraction, extract_parse_expressions, is_negated, span_head
from .nounphrase import (
    NOUN_PHRASE_RULE,
    PosPattern,
    PosPatternError,
    extract_noun_phrases,
)
from .semgrex import (
    CAPTURE_NAMES,
    DepPattern,
    PatternSyntaxError,
    compile_pattern,
    load_rules,
    match_pattern,
)

__all__ = [
    "CAPTURE_NAMES",
    "DepPattern",
    "NOUN_PHRASE_RULE",
    "ParseExtraction",
    "PatternSyntaxError",
    "PosPattern",
    "PosPatternError",
    "compile_pattern",
    "extract_noun_phrases",
    "extract_parse_expressions",
    "is_negated",
    "load_rules",
    "match_pattern",
    "span_head",
]
