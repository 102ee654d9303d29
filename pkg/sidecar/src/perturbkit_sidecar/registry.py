"""Model registry mapping protocol kinds to backends.

In fake mode every kind resolves to the deterministic fake backend. In real
mode models are loaded lazily from the configured identifiers; a load failure
aborts startup, except the judge which is marked unavailable when no API key
is configured.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, field

from . import fake

KINDS = ("paraphrase", "translate", "fill_mask", "perplexity", "similarity", "judge")

DEFAULT_MODELS = {
    "paraphrase": "kalpeshk2011/dipper-paraphraser-xxl",
    "translate_en_fr": "Helsinki-NLP/opus-mt-en-fr",
    "translate_fr_en": "Helsinki-NLP/opus-mt-fr-en",
    "fill_mask_sentence": "facebook/bart-large",
    "fill_mask_word": "bert-base-uncased",
    "perplexity": "gpt2",
    "similarity": "sentence-transformers/all-MiniLM-L6-v2",
}

ENV_PREFIX = "SIDECAR_"


@dataclass
class ModelEntry:
    model_id: str
    decoding: dict = field(default_factory=dict)
    device: str = "cpu"
    ready: bool = True


@dataclass
class ModelRegistry:
    fake_mode: bool
    entries: dict[str, ModelEntry] = field(default_factory=dict)
    locks: dict[str, threading.Lock] = field(default_factory=dict)
    backends: dict = field(default_factory=dict)

    def model_tag(self, kind: str) -> str:
        if self.fake_mode:
            return f"fake:{kind}"
        entry = self.entries.get(kind)
        decoding = ",".join(f"{k}={v}" for k, v in sorted(entry.decoding.items())) if entry else ""
        return f"{entry.model_id}" + (f"[{decoding}]" if decoding else "")

    def readiness(self) -> dict[str, bool]:
        if self.fake_mode:
            return {kind: True for kind in KINDS}
        return {kind: self.entries[kind].ready for kind in KINDS}


def _env(name: str, default: str) -> str:
    return os.environ.get(ENV_PREFIX + name, default)


def build_registry(fake_mode: bool, device: str = "cpu") -> ModelRegistry:
    registry = ModelRegistry(fake_mode=fake_mode)
    if fake_mode:
        registry.backends = {
            "paraphrase": fake.paraphrase,
            "translate": fake.translate,
            "fill_mask": fake.fill_mask,
            "perplexity": fake.perplexity,
            "similarity": fake.similarity,
            "judge": fake.judge,
        }
        return registry

    from . import models  # heavy imports stay out of fake mode

    for kind in KINDS:
        registry.locks[kind] = threading.Lock()
    registry.entries = {
        "paraphrase": ModelEntry(_env("PARAPHRASE_MODEL", DEFAULT_MODELS["paraphrase"]),
                                 decoding={"max_new_tokens": 512}, device=device),
        "translate": ModelEntry(_env("TRANSLATE_EN_FR", DEFAULT_MODELS["translate_en_fr"]),
                                decoding={"num_beams": 4}, device=device),
        "fill_mask": ModelEntry(_env("FILL_MASK_WORD", DEFAULT_MODELS["fill_mask_word"]), device=device),
        "perplexity": ModelEntry(_env("PERPLEXITY_MODEL", DEFAULT_MODELS["perplexity"]), device=device),
        "similarity": ModelEntry(_env("SIMILARITY_MODEL", DEFAULT_MODELS["similarity"]), device=device),
        "judge": ModelEntry(_env("JUDGE_MODEL", "gpt-3.5-turbo")),
    }
    registry.backends = models.load_backends(registry)
    return registry
