"""The 12 black-box perturbation operators and their batch dispatcher."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

from ..dataset import Document
from ..errors import ConfigurationError, PerturbkitError
from ..genclient import GenerationClient
from .base import (
    GRANULARITY,
    NEURAL_OPERATORS,
    OPERATORS,
    PARAM_SPECS,
    PerturbationFailure,
    PerturbationResult,
    PerturbationSpec,
    doc_rng,
    resolve_params,
)
from .native import (
    flip_first_char_case,
    insert_adverbs,
    insert_spaces,
    keyboard_typos,
    merge_words,
    misspell_words,
    remove_punctuation,
)
from .neural import (
    backtranslate_doc,
    backtranslate_sentences,
    mlm_sentences,
    mlm_words,
    paraphrase_doc,
)

__all__ = [
    "OPERATORS",
    "NEURAL_OPERATORS",
    "GRANULARITY",
    "PARAM_SPECS",
    "PerturbationSpec",
    "PerturbationResult",
    "PerturbationFailure",
    "apply",
    "apply_batch",
    "doc_rng",
    "resolve_params",
    "paraphrase_doc",
    "backtranslate_doc",
    "backtranslate_sentences",
    "mlm_sentences",
    "mlm_words",
    "insert_adverbs",
    "misspell_words",
    "keyboard_typos",
    "merge_words",
    "flip_first_char_case",
    "remove_punctuation",
    "insert_spaces",
]


def _dispatch_table() -> dict[str, Callable]:
    return {
        "paraphrase": lambda doc, p, client, seed: paraphrase_doc(doc, client=client, seed=seed, **p),
        "doc_backtrans": lambda doc, p, client, seed: backtranslate_doc(doc, client=client, seed=seed, **p),
        "sent_backtrans": lambda doc, p, client, seed: backtranslate_sentences(doc, client=client, seed=seed, **p),
        "sent_mlm": lambda doc, p, client, seed: mlm_sentences(doc, client=client, seed=seed, **p),
        "word_mlm": lambda doc, p, client, seed: mlm_words(doc, client=client, seed=seed, **p),
        "adv_insert": lambda doc, p, client, seed: insert_adverbs(doc, seed=seed, **p),
        "spelling": lambda doc, p, client, seed: misspell_words(doc, seed=seed, **p),
        "typos": lambda doc, p, client, seed: keyboard_typos(doc, seed=seed, **p),
        "word_merge": lambda doc, p, client, seed: merge_words(doc, seed=seed, **p),
        "case_flip": lambda doc, p, client, seed: flip_first_char_case(doc, seed=seed, **p),
        "punct_remove": lambda doc, p, client, seed: remove_punctuation(doc, seed=seed, **p),
        "space_insert": lambda doc, p, client, seed: insert_spaces(doc, seed=seed, **p),
    }


_DISPATCH = _dispatch_table()


def apply(doc: Document, spec: PerturbationSpec, client: GenerationClient | None = None) -> PerturbationResult:
    """Run one operator on one document; parameters validated before any client call."""
    if spec.operator not in _DISPATCH:
        raise ConfigurationError(f"unknown operator {spec.operator!r}")
    params = resolve_params(spec.operator, spec.params)
    return _DISPATCH[spec.operator](doc, params, client, spec.seed)


def apply_batch(
    docs: Sequence[Document],
    spec: PerturbationSpec,
    client: GenerationClient | None = None,
    max_workers: int = 1,
) -> list[PerturbationResult | PerturbationFailure]:
    """Apply one operator to many documents, results in input order.

    Per-document failures become PerturbationFailure records and the batch
    continues; per-document seeds are mixed from (spec.seed, doc.id), so the
    outputs are independent of batch order and worker scheduling.
    """
    if spec.operator not in _DISPATCH:
        raise ConfigurationError(f"unknown operator {spec.operator!r}")
    resolve_params(spec.operator, spec.params)

    def run_one(doc: Document) -> PerturbationResult | PerturbationFailure:
        try:
            return apply(doc, spec, client)
        except (PerturbkitError, ValueError) as exc:
            return PerturbationFailure(original_id=doc.id, operator=spec.operator, seed=spec.seed, error=str(exc))

    if max_workers <= 1 or len(docs) <= 1:
        return [run_one(d) for d in docs]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(run_one, docs))
