"""Deterministic fake-model backends: zero downloads, stable outputs.

Every function is a pure function of its inputs (randomness is seeded from a
content hash), so contract tests and recorded sessions are reproducible
bit-for-bit.
"""

from __future__ import annotations

import hashlib
import random
import re

MASK_TOKEN = "<|mask|>"

_SYNONYMS = {
    "explore": "investigate", "use": "employ", "show": "demonstrate",
    "big": "large", "small": "little", "method": "approach",
    "result": "outcome", "paper": "work", "study": "analysis",
    "important": "significant", "many": "numerous", "make": "produce",
    "find": "discover", "look": "examine", "good": "strong",
    "fast": "rapid", "new": "novel", "old": "prior", "help": "assist",
    "start": "begin", "end": "conclude", "think": "believe",
}

_FILL_WORDS = (
    "notably", "system", "result", "model", "case", "value", "signal",
    "pattern", "measure", "factor", "sample", "process", "feature", "effect",
)

_FILL_SENTENCES = (
    "Further analysis supports this view.",
    "The remaining cases follow the same pattern.",
    "Additional measurements confirm the effect.",
    "This behavior holds across all tested settings.",
    "A similar trend appears in the control data.",
)

_SENTENCE_RE = re.compile(r"[^.?!]+[.?!]?")


def _rng(*parts: object) -> random.Random:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def paraphrase(text: str, lex: int, order: int) -> str:
    """Lexical substitutions and local reorderings scaled by lex/order."""
    rng = _rng("paraphrase", text, lex, order)
    out_sentences = []
    for sentence in _SENTENCE_RE.findall(text):
        words = sentence.split()
        for i, word in enumerate(words):
            bare = word.strip(".,;:!?").lower()
            if bare in _SYNONYMS and rng.random() < lex / 100:
                repl = _SYNONYMS[bare]
                if word[0].isupper():
                    repl = repl.capitalize()
                words[i] = word.replace(word.strip(".,;:!?"), repl, 1)
        i = 1
        while i < len(words) - 1:
            if rng.random() < order / 200:
                words[i], words[i + 1] = words[i + 1], words[i]
                i += 2
            else:
                i += 1
        out_sentences.append(" ".join(words))
    return " ".join(out_sentences) or text


def translate(text: str, source_lang: str, target_lang: str) -> str:
    """Toy involutive 'translation': word order reversed inside sentences."""
    out_sentences = []
    for sentence in _SENTENCE_RE.findall(text):
        stripped = sentence.strip()
        terminal = stripped[-1] if stripped and stripped[-1] in ".?!" else ""
        body = stripped[:-1] if terminal else stripped
        words = body.split()
        out_sentences.append(" ".join(reversed(words)) + terminal)
    return " ".join(out_sentences) or text


def fill_mask(text: str, granularity: str) -> list[str]:
    """One deterministic completion per mask token, from a fixed table."""
    fills = []
    table = _FILL_SENTENCES if granularity == "sentence" else _FILL_WORDS
    for index in range(text.count(MASK_TOKEN)):
        rng = _rng("fill", granularity, text, index)
        fills.append(table[rng.randrange(len(table))])
    return fills


def perplexity(text: str) -> float:
    rng = _rng("perplexity", text)
    return round(5.0 + rng.random() * 20.0, 4)


def similarity(text_a: str, text_b: str) -> float:
    """Token-set Jaccard: exactly 1.0 for identical texts."""
    a = {w.lower() for w in text_a.split()}
    b = {w.lower() for w in text_b.split()}
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def judge(texts: list[str]) -> list[int]:
    return [1 + _rng("judge", t).randrange(10) for t in texts]
