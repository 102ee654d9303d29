"""Deterministic text segmentation with exact-offset spans.

Every perturbation operator works on top of this module: words, punctuation,
whitespace, and sentences are all represented as (start, end) code-point
offsets into the original string, so any edit can be expressed as a reversible
span replacement and replayed byte-for-byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import SpanConflictError

WORD = "word"
PUNCTUATION = "punctuation"
WHITESPACE = "whitespace"

# Words are maximal runs of letters/digits, allowing a single apostrophe or
# hyphen when it sits between two word characters ("don't", "state-of-the-art").
_WORD_RE = re.compile(r"[^\W_]+(?:['’-][^\W_]+)*", re.UNICODE)

# Abbreviations whose trailing period never ends a sentence.
ABBREVIATIONS = (
    "e.g.", "i.e.", "etc.", "cf.", "vs.", "al.", "dr.", "mr.", "mrs.", "ms.",
    "prof.", "fig.", "figs.", "eq.", "eqs.", "sec.", "ch.", "no.", "st.",
    "jr.", "sr.", "dept.", "inc.", "ltd.", "approx.",
)

_TERMINALS = ".?!"
_VOWELS = set("aeiouy")


@dataclass(frozen=True)
class Span:
    """Half-open [start, end) offset range with a token class."""

    start: int
    end: int
    kind: str

    def text(self, source: str) -> str:
        return source[self.start:self.end]


@dataclass(frozen=True)
class SpanMap:
    """Full-coverage segmentation of one text.

    Concatenating ``token_spans`` in order reproduces the input exactly;
    every sentence span is a union of contiguous token spans.
    """

    token_spans: tuple[Span, ...]
    sentence_spans: tuple[tuple[int, int], ...]

    def words(self) -> list[Span]:
        return [s for s in self.token_spans if s.kind == WORD]

    def punctuation(self) -> list[Span]:
        return [s for s in self.token_spans if s.kind == PUNCTUATION]

    def whitespace(self) -> list[Span]:
        return [s for s in self.token_spans if s.kind == WHITESPACE]


@dataclass(frozen=True)
class Edit:
    """Replace ``[start, end)`` of the original text with ``replacement``."""

    start: int
    end: int
    replacement: str
    operator_tag: str = ""


def _classify_gap(text: str, start: int, end: int, out: list[Span]) -> None:
    i = start
    while i < end:
        if text[i].isspace():
            j = i
            while j < end and text[j].isspace():
                j += 1
            out.append(Span(i, j, WHITESPACE))
            i = j
        else:
            # Any non-space, non-word character is a single punctuation token.
            out.append(Span(i, i + 1, PUNCTUATION))
            i += 1


def _token_spans(text: str) -> list[Span]:
    spans: list[Span] = []
    pos = 0
    for m in _WORD_RE.finditer(text):
        if m.start() > pos:
            _classify_gap(text, pos, m.start(), spans)
        spans.append(Span(m.start(), m.end(), WORD))
        pos = m.end()
    if pos < len(text):
        _classify_gap(text, pos, len(text), spans)
    return spans


def _is_abbreviation(text: str, period_end: int) -> bool:
    for ab in ABBREVIATIONS:
        start = period_end - len(ab)
        if start < 0:
            continue
        if text[start:period_end].lower() != ab:
            continue
        if start == 0 or not _WORD_RE.match(text[start - 1]):
            return True
    return False


def _sentence_spans(text: str, tokens: list[Span]) -> list[tuple[int, int]]:
    sentences: list[tuple[int, int]] = []
    current_start: int | None = None
    last_end: int | None = None
    for idx, tok in enumerate(tokens):
        if tok.kind == WHITESPACE:
            continue
        if current_start is None:
            current_start = tok.start
        last_end = tok.end
        if tok.kind != PUNCTUATION or text[tok.start] not in _TERMINALS:
            continue
        nxt = tokens[idx + 1] if idx + 1 < len(tokens) else None
        if nxt is not None and nxt.kind != WHITESPACE:
            continue
        if text[tok.start] == "." and _is_abbreviation(text, tok.end):
            continue
        sentences.append((current_start, tok.end))
        current_start = None
        last_end = None
    if current_start is not None and last_end is not None:
        sentences.append((current_start, last_end))
    return sentences


def tokenize(text: str) -> SpanMap:
    """Segment ``text`` into word/punctuation/whitespace spans plus sentences.

    Pure and deterministic; empty input yields an empty SpanMap.
    """
    tokens = _token_spans(text)
    sentences = _sentence_spans(text, tokens)
    return SpanMap(token_spans=tuple(tokens), sentence_spans=tuple(sentences))


def split_sentences(text: str) -> tuple[tuple[int, int], ...]:
    """Sentence spans of ``text``; see tokenize() for the full map."""
    return tokenize(text).sentence_spans


def validate_edits(text: str, edits: list[Edit]) -> None:
    """Raise SpanConflictError unless ``edits`` are sorted, disjoint, in-range."""
    prev_end = 0
    for e in edits:
        if e.start < 0 or e.end > len(text) or e.start > e.end:
            raise SpanConflictError(f"edit span ({e.start}, {e.end}) out of range for text of length {len(text)}")
        if e.start < prev_end:
            raise SpanConflictError(f"edit at {e.start} overlaps previous edit ending at {prev_end}")
        prev_end = e.end


def apply_edits(text: str, edits: list[Edit]) -> str:
    """Apply a sorted, non-overlapping edit list; unedited spans are untouched."""
    validate_edits(text, edits)
    parts: list[str] = []
    pos = 0
    for e in edits:
        parts.append(text[pos:e.start])
        parts.append(e.replacement)
        pos = e.end
    parts.append(text[pos:])
    return "".join(parts)


def count_syllables(word: str) -> int:
    """Vowel-group syllable estimate, always >= 1 for a word with a letter.

    A terminal "e" is silent (not counted) unless it closes a consonant+"le"
    ending, e.g. "readable" keeps its final syllable while "made" drops it.
    """
    lowered = word.lower()
    letters = [c for c in lowered if c.isalpha()]
    if not letters:
        raise ValueError(f"cannot count syllables of {word!r}: no letters")

    groups = 0
    in_group = False
    for c in lowered:
        if c in _VOWELS:
            if not in_group:
                groups += 1
            in_group = True
        else:
            in_group = False

    if letters[-1] == "e":
        consonant_le = len(letters) >= 3 and letters[-2] == "l" and letters[-3] not in _VOWELS
        if not consonant_le:
            groups -= 1
    return max(groups, 1)
