from __future__ import annotations

import random

import pytest

from perturbkit.dataset import Document
from perturbkit.genclient import GenerationClient, GenRequest, GenResponse

VOCAB = (
    "the quick brown fox jumps over lazy dog while seven wizards brew strong "
    "coffee under ancient oak trees near winding rivers and model systems "
    "process noisy signals from distant probes measuring field strength"
).split()


def make_text(rng: random.Random, n_words: int, vocab=VOCAB) -> str:
    """Synthetic English-ish prose: sentences of 5-12 words ending in . ? or !"""
    words = []
    remaining = n_words
    while remaining > 0:
        length = min(rng.randint(5, 12), remaining)
        sentence = [rng.choice(vocab) for _ in range(length)]
        sentence[0] = sentence[0].capitalize()
        if length > 4 and rng.random() < 0.4:
            sentence[rng.randrange(1, length - 1)] += ","
        words.append(" ".join(sentence) + rng.choice("..?!"))
        remaining -= length
    return " ".join(words)


def make_doc(doc_id: str, text: str, label: str = "ai", split: str | None = None) -> Document:
    return Document(id=doc_id, text=text, label=label, split=split)


def make_vocab(rng: random.Random, n: int, prefix: str = "") -> list[str]:
    """Pronounceable pseudo-word vocabulary; realistic sizes keep BM25 idf
    weights meaningful on synthetic corpora."""
    consonants, vowels = "bcdfghjklmnpqrstvwz", "aeiou"
    out: set[str] = set()
    while len(out) < n:
        word = "".join(rng.choice(consonants) + rng.choice(vowels) for _ in range(rng.randint(2, 4)))
        out.add(prefix + word)
    return sorted(out)


def make_prose(rng: random.Random, vocab: list[str], n_words: int) -> str:
    """Sentences of 6-12 vocab words with capitalization and terminals."""
    chunks = []
    remaining = n_words
    while remaining > 0:
        length = min(rng.randint(6, 12), remaining)
        sentence = [rng.choice(vocab) for _ in range(length)]
        sentence[0] = sentence[0].capitalize()
        if length > 5 and rng.random() < 0.3:
            sentence[rng.randrange(1, length - 1)] += ","
        chunks.append(" ".join(sentence) + rng.choice("..?!"))
        remaining -= length
    return " ".join(chunks)


def styled_prose(rng: random.Random, core: list[str], tail: list[str], core_frac: float, n_words: int) -> str:
    """Prose with a stylistic vocabulary bias: AI-like text leans on a narrow
    core, human-like text ranges over the tail as well."""
    chunks = []
    remaining = n_words
    while remaining > 0:
        length = min(rng.randint(6, 12), remaining)
        sentence = [rng.choice(core) if rng.random() < core_frac else rng.choice(tail) for _ in range(length)]
        sentence[0] = sentence[0].capitalize()
        chunks.append(" ".join(sentence) + rng.choice("..?!"))
        remaining -= length
    return " ".join(chunks)


def make_corpus(rng: random.Random, n_docs: int, n_words: int = 40, label: str = "ai", prefix: str = "doc") -> list[Document]:
    return [make_doc(f"{prefix}-{i:04d}", make_text(rng, n_words), label=label) for i in range(n_docs)]


class CountingClient(GenerationClient):
    """Forwards to an inner client while counting requests per kind."""

    def __init__(self, inner: GenerationClient):
        super().__init__()
        self.inner = inner
        self.calls: dict[str, int] = {}

    def request(self, req: GenRequest) -> GenResponse:
        self.calls[req.kind] = self.calls.get(req.kind, 0) + 1
        return self.inner.request(req)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
