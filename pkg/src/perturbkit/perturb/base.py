"""Shared perturbation types, parameter validation, and seeding."""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field

from ..dataset import Document
from ..errors import ConfigurationError
from ..textseg import Edit, SpanMap, apply_edits, tokenize

OPERATORS = (
    "paraphrase",
    "doc_backtrans",
    "sent_backtrans",
    "sent_mlm",
    "word_mlm",
    "adv_insert",
    "spelling",
    "typos",
    "word_merge",
    "case_flip",
    "punct_remove",
    "space_insert",
)

NEURAL_OPERATORS = frozenset({"paraphrase", "doc_backtrans", "sent_backtrans", "sent_mlm", "word_mlm"})

GRANULARITY = {
    "paraphrase": "doc",
    "doc_backtrans": "doc",
    "sent_backtrans": "sent",
    "sent_mlm": "sent",
    "word_mlm": "word",
    "adv_insert": "word",
    "spelling": "word",
    "typos": "word",
    "word_merge": "char",
    "case_flip": "char",
    "punct_remove": "char",
    "space_insert": "char",
}

_PERCENT_STEPS = (0, 20, 40, 60, 80, 100)


def _percent(name):
    def check(v):
        if v not in _PERCENT_STEPS:
            raise ConfigurationError(f"{name} must be one of {_PERCENT_STEPS}, got {v!r}")
        return int(v)
    return check


def _ratio(name):
    def check(v):
        v = float(v)
        if not 0 < v <= 1:
            raise ConfigurationError(f"{name} must be in (0, 1], got {v!r}")
        return v
    return check


def _positive_int(name):
    def check(v):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise ConfigurationError(f"{name} must be a positive integer, got {v!r}")
        return v
    return check


def _lang(name):
    def check(v):
        if not isinstance(v, str) or len(v) < 2:
            raise ConfigurationError(f"{name} must be a language tag, got {v!r}")
        return v
    return check


# operator -> {param: (default, validator)}
PARAM_SPECS: dict[str, dict] = {
    "paraphrase": {"lex": (40, _percent("lex")), "order": (40, _percent("order"))},
    "doc_backtrans": {"pivot_language": ("fr", _lang("pivot_language"))},
    "sent_backtrans": {
        "max_windows": (3, _positive_int("max_windows")),
        "max_window_len": (5, _positive_int("max_window_len")),
    },
    "sent_mlm": {
        "min_masked": (2, _positive_int("min_masked")),
        "max_masked": (5, _positive_int("max_masked")),
    },
    "word_mlm": {"max_ratio": (0.20, _ratio("max_ratio"))},
    "adv_insert": {"max_ratio": (0.20, _ratio("max_ratio"))},
    "spelling": {"max_ratio": (0.20, _ratio("max_ratio"))},
    "typos": {"max_ratio": (0.20, _ratio("max_ratio"))},
    "word_merge": {
        "min_merges": (3, _positive_int("min_merges")),
        "max_merges": (10, _positive_int("max_merges")),
    },
    "case_flip": {"max_ratio": (0.20, _ratio("max_ratio"))},
    "punct_remove": {"max_ratio": (0.30, _ratio("max_ratio"))},
    "space_insert": {
        "min_inserts": (5, _positive_int("min_inserts")),
        "max_inserts": (10, _positive_int("max_inserts")),
    },
}

_RANGE_PAIRS = {
    "sent_backtrans": None,
    "sent_mlm": ("min_masked", "max_masked"),
    "word_merge": ("min_merges", "max_merges"),
    "space_insert": ("min_inserts", "max_inserts"),
}


@dataclass(frozen=True)
class PerturbationSpec:
    """Which operator to run, with what parameters, under which seed."""

    operator: str
    params: dict = field(default_factory=dict)
    seed: int = 0


@dataclass
class PerturbationResult:
    original_id: str
    operator: str
    perturbed_text: str
    edits: list[Edit] | None  # None marks a full rewrite
    applied_count: int
    seed: int
    params: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


@dataclass
class PerturbationFailure:
    """Error record kept in the result stream when one document fails."""

    original_id: str
    operator: str
    seed: int
    error: str


def resolve_params(operator: str, params: dict | None) -> dict:
    """Fill defaults and validate; unknown names and bad values are rejected."""
    if operator not in PARAM_SPECS:
        raise ConfigurationError(f"unknown operator {operator!r}")
    spec = PARAM_SPECS[operator]
    params = dict(params or {})
    unknown = set(params) - set(spec)
    if unknown:
        raise ConfigurationError(f"{operator}: unknown parameters {sorted(unknown)}")
    resolved = {}
    for name, (default, check) in spec.items():
        resolved[name] = check(params.get(name, default))
    pair = _RANGE_PAIRS.get(operator)
    if pair is not None:
        lo, hi = pair
        if resolved[lo] > resolved[hi]:
            raise ConfigurationError(f"{operator}: {lo} must be <= {hi}")
    return resolved


def doc_rng(seed: int, doc_id: str) -> random.Random:
    """Per-document generator: mixing the doc id keeps batches order-independent."""
    digest = hashlib.sha256(f"{seed}:{doc_id}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def require_text(doc: Document) -> SpanMap:
    if not doc.text:
        raise ValueError(f"document {doc.id!r} has empty text")
    return tokenize(doc.text)


def word_cap(word_count: int, max_ratio: float) -> int:
    return math.floor(max_ratio * word_count)


def finalize(
    doc: Document,
    operator: str,
    edits: list[Edit],
    seed: int,
    params: dict,
    notes: list[str],
) -> PerturbationResult:
    """Apply edits and count only the ones that changed bytes."""
    edits = sorted(edits, key=lambda e: (e.start, e.end))
    perturbed = apply_edits(doc.text, edits)
    applied = sum(1 for e in edits if e.replacement != doc.text[e.start:e.end])
    return PerturbationResult(
        original_id=doc.id,
        operator=operator,
        perturbed_text=perturbed,
        edits=edits,
        applied_count=applied,
        seed=seed,
        params=params,
        notes=notes,
    )
