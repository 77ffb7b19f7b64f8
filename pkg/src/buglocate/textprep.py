"""Turn bug-report prose and Java source into stemmed token lists.

Identifiers are split on underscores, camelCase humps and letter/digit
transitions; a compound identifier is also kept whole (lowercased, without
underscores), so ``parseFile`` yields ``parsefil``, ``pars`` and ``file``.
"""

import re
from importlib import resources

from .porter import porter_stem

REPORT_TEXT = "report_text"
SOURCE_CODE = "source_code"

_IDENTIFIER = re.compile(r"[A-Za-z0-9_]+")
_HUMPS = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+")


def load_term_list(path=None, default=None) -> frozenset:
    """Read a one-term-per-line list; ``#`` starts a comment line."""
    if path is None:
        text = resources.files("buglocate.data").joinpath(default).read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return frozenset(
        line.strip().lower() for line in text.splitlines() if line.strip() and not line.startswith("#")
    )


STOP_WORDS = load_term_list(default="stopwords.txt")
JAVA_KEYWORDS = load_term_list(default="java_keywords.txt")


def split_identifier(identifier: str) -> list:
    """Split on underscores, camelCase humps and digit runs, preserving case."""
    parts = []
    for piece in identifier.split("_"):
        parts.extend(_HUMPS.findall(piece))
    return parts


def raw_terms(text: str) -> list:
    """Lowercased terms before any filtering or stemming.

    Each identifier contributes itself (when it splits into more than one
    part) followed by its parts.
    """
    terms = []
    for ident in _IDENTIFIER.findall(text):
        parts = split_identifier(ident)
        if len(parts) > 1:
            compound = ident.replace("_", "").lower()
            if compound:
                terms.append(compound)
        terms.extend(p.lower() for p in parts)
    return terms


class TextPreprocessor:
    """Tokenizer with configurable stop-word and keyword lists."""

    def __init__(self, stop_words=STOP_WORDS, keywords=JAVA_KEYWORDS):
        self.stop_words = frozenset(stop_words)
        self.keywords = frozenset(keywords)

    @classmethod
    def from_files(cls, stop_words_path=None, keywords_path=None):
        return cls(
            load_term_list(stop_words_path, "stopwords.txt"),
            load_term_list(keywords_path, "java_keywords.txt"),
        )

    def tokenize(self, text: str, kind: str = REPORT_TEXT) -> list:
        if kind not in (REPORT_TEXT, SOURCE_CODE):
            raise ValueError(f"unknown text kind {kind!r}")
        blocked = self.stop_words | self.keywords if kind == SOURCE_CODE else self.stop_words
        tokens = []
        for term in raw_terms(text or ""):
            if term in blocked:
                continue
            stem = porter_stem(term)
            # A stem can collide with a blocked word ("classes" -> "class").
            if stem and stem not in blocked:
                tokens.append(stem)
        return tokens


DEFAULT = TextPreprocessor()


def tokenize(text: str, kind: str = REPORT_TEXT) -> list:
    return DEFAULT.tokenize(text, kind)
