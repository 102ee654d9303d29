"""Shipped lexicons backing the native operators.

All files live under perturbkit/data and are plain text so they can be
swapped or extended without code changes:

- adverbs.txt: one adverb per line
- verb_forms.txt / verb_noun_stoplist.txt: verb lexicon + suffix stoplist
- qwerty_adjacency.txt: ``char<TAB>neighbors``
- misspellings.tsv: ``correct<TAB>wrong1,wrong2``
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

_VERB_SUFFIXES = (
    "ize", "izes", "ized", "izing",
    "ify", "ifies", "ified", "ifying",
    "ate", "ates", "ated", "ating",
)


def _read_data(name: str) -> str:
    return resources.files("perturbkit.data").joinpath(name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def adverbs() -> tuple[str, ...]:
    return tuple(line.strip() for line in _read_data("adverbs.txt").splitlines() if line.strip())


@lru_cache(maxsize=None)
def verb_forms() -> frozenset[str]:
    return frozenset(line.strip() for line in _read_data("verb_forms.txt").splitlines() if line.strip())


@lru_cache(maxsize=None)
def verb_noun_stoplist() -> frozenset[str]:
    return frozenset(line.strip() for line in _read_data("verb_noun_stoplist.txt").splitlines() if line.strip())


@lru_cache(maxsize=None)
def qwerty_neighbors() -> dict[str, str]:
    out: dict[str, str] = {}
    for line in _read_data("qwerty_adjacency.txt").splitlines():
        if not line.strip():
            continue
        char, neighbors = line.split("\t")
        out[char] = neighbors
    return out


def parse_misspellings(text: str) -> dict[str, tuple[str, ...]]:
    """Parse the ``correct<TAB>wrong1,wrong2`` format, keys lowercased."""
    out: dict[str, tuple[str, ...]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            correct, wrongs = line.split("\t")
        except ValueError as exc:
            raise ValueError(f"misspelling line {lineno}: expected correct<TAB>wrong1,wrong2") from exc
        variants = tuple(w.strip() for w in wrongs.split(",") if w.strip())
        if not variants:
            raise ValueError(f"misspelling line {lineno}: no variants for {correct!r}")
        out[correct.strip().lower()] = variants
    return out


@lru_cache(maxsize=None)
def misspellings() -> dict[str, tuple[str, ...]]:
    return parse_misspellings(_read_data("misspellings.tsv"))


def load_misspellings(path: str | Path) -> dict[str, tuple[str, ...]]:
    return parse_misspellings(Path(path).read_text(encoding="utf-8"))


def looks_like_verb(word: str) -> bool:
    """Lexicon hit, or a verb-like suffix not blocked by the noun stoplist."""
    lowered = word.lower()
    if lowered in verb_forms():
        return True
    if lowered in verb_noun_stoplist():
        return False
    return lowered.endswith(_VERB_SUFFIXES) and len(lowered) > 4
