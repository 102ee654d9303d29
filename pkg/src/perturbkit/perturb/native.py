"""The seven model-free operators (word and character granularity).

Every operator is a pure function of (doc, params, seed): randomness comes
from a per-document generator, selection targets the parameter cap, and the
output is an edit list replayable against the original text.
"""

from __future__ import annotations

from ..dataset import Document
from ..textseg import Edit
from . import lexicons
from .base import PerturbationResult, doc_rng, finalize, require_text, resolve_params


def _selection(rng, eligible: list, k: int) -> list:
    """Uniform sample without replacement, returned in position order."""
    if k <= 0 or not eligible:
        return []
    picked = rng.sample(eligible, min(k, len(eligible)))
    return sorted(picked, key=lambda s: s.start)


def insert_adverbs(doc: Document, max_ratio: float = 0.20, seed: int = 0) -> PerturbationResult:
    """Insert a lexicon adverb (plus a space) before selected verbs."""
    params = resolve_params("adv_insert", {"max_ratio": max_ratio})
    spans = require_text(doc)
    rng = doc_rng(seed, doc.id)
    words = spans.words()
    verbs = [w for w in words if lexicons.looks_like_verb(w.text(doc.text))]
    cap = int(params["max_ratio"] * len(words))
    chosen = _selection(rng, verbs, cap)
    notes = []
    if not chosen:
        notes.append("no-candidates")
    adverb_pool = lexicons.adverbs()
    edits = [Edit(v.start, v.start, rng.choice(adverb_pool) + " ", "adv_insert") for v in chosen]
    return finalize(doc, "adv_insert", edits, seed, params, notes)


def misspell_words(
    doc: Document,
    max_ratio: float = 0.20,
    dictionary: dict[str, tuple[str, ...]] | None = None,
    seed: int = 0,
) -> PerturbationResult:
    """Swap dictionary-hit words for a misspelling, keeping first-letter case."""
    params = resolve_params("spelling", {"max_ratio": max_ratio})
    if dictionary is None:
        dictionary = lexicons.misspellings()
    if not dictionary:
        raise ValueError("misspelling dictionary must be non-empty")
    spans = require_text(doc)
    rng = doc_rng(seed, doc.id)
    words = spans.words()
    hits = [w for w in words if w.text(doc.text).lower() in dictionary]
    cap = int(params["max_ratio"] * len(words))
    chosen = _selection(rng, hits, cap)
    notes = []
    if not chosen:
        notes.append("no-candidates")
    edits = []
    for w in chosen:
        original = w.text(doc.text)
        wrong = rng.choice(list(dictionary[original.lower()]))
        if original[0].isupper():
            wrong = wrong[0].upper() + wrong[1:]
        edits.append(Edit(w.start, w.end, wrong, "spelling"))
    return finalize(doc, "spelling", edits, seed, params, notes)


_TYPO_KINDS = ("substitute", "swap", "insert", "delete")


def _typo(rng, word: str, neighbors: dict[str, str]) -> str:
    kind = rng.choice(_TYPO_KINDS)
    mappable = [i for i, c in enumerate(word) if c.lower() in neighbors]
    if kind == "substitute":
        if not mappable:
            kind = "swap"
        else:
            i = rng.choice(mappable)
            repl = rng.choice(neighbors[word[i].lower()])
            if word[i].isupper():
                repl = repl.upper()
            return word[:i] + repl + word[i + 1:]
    if kind == "swap":
        unequal = [i for i in range(len(word) - 1) if word[i] != word[i + 1]]
        i = rng.choice(unequal) if unequal else 0
        return word[:i] + word[i + 1] + word[i] + word[i + 2:]
    if kind == "insert":
        if mappable:
            i = rng.choice(mappable)
            extra = rng.choice(neighbors[word[i].lower()])
            if word[i].isupper():
                extra = extra.upper()
        else:
            i = rng.randrange(len(word))
            extra = word[i]
        side = rng.choice((0, 1))
        return word[:i + side] + extra + word[i + side:]
    i = rng.randrange(len(word))  # delete
    return word[:i] + word[i + 1:]


def keyboard_typos(doc: Document, max_ratio: float = 0.20, seed: int = 0) -> PerturbationResult:
    """One keyboard typo per selected word: substitute/swap/insert/delete."""
    params = resolve_params("typos", {"max_ratio": max_ratio})
    spans = require_text(doc)
    rng = doc_rng(seed, doc.id)
    words = spans.words()
    eligible = [w for w in words if w.end - w.start >= 2]
    cap = int(params["max_ratio"] * len(words))
    chosen = _selection(rng, eligible, cap)
    notes = []
    if not chosen:
        notes.append("no-candidates")
    neighbors = lexicons.qwerty_neighbors()
    edits = [Edit(w.start, w.end, _typo(rng, w.text(doc.text), neighbors), "typos") for w in chosen]
    return finalize(doc, "typos", edits, seed, params, notes)


def merge_words(doc: Document, min_merges: int = 3, max_merges: int = 10, seed: int = 0) -> PerturbationResult:
    """Delete single-space boundaries between tokens (word-merging errors)."""
    params = resolve_params("word_merge", {"min_merges": min_merges, "max_merges": max_merges})
    spans = require_text(doc)
    rng = doc_rng(seed, doc.id)
    tokens = spans.token_spans
    boundaries = [
        t for i, t in enumerate(tokens)
        if t.kind == "whitespace" and doc.text[t.start:t.end] == " " and 0 < i < len(tokens) - 1
    ]
    notes = []
    k = rng.randint(params["min_merges"], params["max_merges"])
    if k > len(boundaries):
        k = len(boundaries)
        notes.append(f"clamped:boundaries={len(boundaries)}")
    k = max(k, 1) if boundaries else 0
    if not boundaries:
        notes.append("no-candidates")
    chosen = _selection(rng, boundaries, k)
    edits = [Edit(b.start, b.end, "", "word_merge") for b in chosen]
    return finalize(doc, "word_merge", edits, seed, params, notes)


def flip_first_char_case(doc: Document, max_ratio: float = 0.20, seed: int = 0) -> PerturbationResult:
    """Toggle the case of the first letter of selected words."""
    params = resolve_params("case_flip", {"max_ratio": max_ratio})
    spans = require_text(doc)
    rng = doc_rng(seed, doc.id)
    words = spans.words()
    eligible = [w for w in words if doc.text[w.start].isalpha() and doc.text[w.start].lower() != doc.text[w.start].upper()]
    cap = int(params["max_ratio"] * len(words))
    chosen = _selection(rng, eligible, cap)
    notes = [] if chosen else ["no-candidates"]
    edits = []
    for w in chosen:
        first = doc.text[w.start]
        flipped = first.lower() if first.isupper() else first.upper()
        edits.append(Edit(w.start, w.start + 1, flipped, "case_flip"))
    return finalize(doc, "case_flip", edits, seed, params, notes)


def remove_punctuation(doc: Document, max_ratio: float = 0.30, seed: int = 0) -> PerturbationResult:
    """Delete max(1, floor(ratio * n)) punctuation tokens, chosen uniformly."""
    params = resolve_params("punct_remove", {"max_ratio": max_ratio})
    spans = require_text(doc)
    rng = doc_rng(seed, doc.id)
    puncts = spans.punctuation()
    notes = []
    if not puncts:
        notes.append("no-candidates")
        return finalize(doc, "punct_remove", [], seed, params, notes)
    k = max(1, int(params["max_ratio"] * len(puncts)))
    chosen = _selection(rng, puncts, k)
    edits = [Edit(p.start, p.end, "", "punct_remove") for p in chosen]
    return finalize(doc, "punct_remove", edits, seed, params, notes)


def insert_spaces(doc: Document, min_inserts: int = 5, max_inserts: int = 10, seed: int = 0) -> PerturbationResult:
    """Insert single spaces inside words, at most one per word."""
    params = resolve_params("space_insert", {"min_inserts": min_inserts, "max_inserts": max_inserts})
    spans = require_text(doc)
    rng = doc_rng(seed, doc.id)
    eligible = [w for w in spans.words() if w.end - w.start >= 2]
    notes = []
    k = rng.randint(params["min_inserts"], params["max_inserts"])
    if k > len(eligible):
        k = len(eligible)
        notes.append(f"clamped:eligible={len(eligible)}")
    if not eligible:
        notes.append("no-candidates")
    chosen = _selection(rng, eligible, k)
    edits = []
    for w in chosen:
        pos = w.start + rng.randint(1, w.end - w.start - 1)
        edits.append(Edit(pos, pos, " ", "space_insert"))
    return finalize(doc, "space_insert", edits, seed, params, notes)
