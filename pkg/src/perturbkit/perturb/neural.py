"""The five client-backed operators (document and sentence/word rewrites).

These delegate text generation to a GenerationClient; with the identity stub
every one of them is a byte-exact no-op, which is what lets the whole suite
run without models. Client failures carry the operator tag.
"""

from __future__ import annotations

from ..dataset import Document
from ..errors import ProtocolError, ReplayMissError, ServiceError, TransportError
from ..genclient import MASK_TOKEN, GenerationClient
from ..textseg import Edit, apply_edits
from .base import PerturbationResult, doc_rng, finalize, require_text, resolve_params


def _tagged(operator: str):
    class _Wrap:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc_type is None:
                return False
            if issubclass(exc_type, (TransportError, ServiceError, ReplayMissError)):
                raise TransportError(f"{operator}: {exc}") from exc
            if issubclass(exc_type, ProtocolError):
                raise ProtocolError(f"{operator}: {exc}") from exc
            return False

    return _Wrap()


def _full_rewrite(doc: Document, operator: str, text: str, seed: int, params: dict) -> PerturbationResult:
    if not text:
        raise ProtocolError(f"{operator}: client returned empty text")
    return PerturbationResult(
        original_id=doc.id,
        operator=operator,
        perturbed_text=text,
        edits=None,
        applied_count=0 if text == doc.text else 1,
        seed=seed,
        params=params,
        notes=[],
    )


def paraphrase_doc(
    doc: Document,
    lex: int = 40,
    order: int = 40,
    client: GenerationClient | None = None,
    seed: int = 0,
) -> PerturbationResult:
    """Whole-document rewrite at the given lexical/order diversity levels."""
    params = resolve_params("paraphrase", {"lex": lex, "order": order})
    require_text(doc)
    if client is None:
        raise ValueError("paraphrase requires a generation client")
    with _tagged("paraphrase"):
        out = client.paraphrase([doc.text], lex=params["lex"], order=params["order"])[0]
    return _full_rewrite(doc, "paraphrase", out, seed, params)


def backtranslate_doc(
    doc: Document,
    pivot_language: str = "fr",
    client: GenerationClient | None = None,
    seed: int = 0,
) -> PerturbationResult:
    """Round-trip the whole document through a pivot language."""
    params = resolve_params("doc_backtrans", {"pivot_language": pivot_language})
    require_text(doc)
    if client is None:
        raise ValueError("doc_backtrans requires a generation client")
    with _tagged("doc_backtrans"):
        pivot = client.translate([doc.text], "en", params["pivot_language"])[0]
        out = client.translate([pivot], params["pivot_language"], "en")[0]
    return _full_rewrite(doc, "doc_backtrans", out, seed, params)


def _pick_windows(rng, n_sentences: int, max_windows: int, max_window_len: int) -> list[tuple[int, int]]:
    """Up to max_windows disjoint runs of 1..max_window_len sentences."""
    target = rng.randint(1, max_windows)
    taken = [False] * n_sentences
    windows: list[tuple[int, int]] = []
    for _ in range(target):
        length = min(rng.randint(1, max_window_len), n_sentences)
        starts: list[int] = []
        while length >= 1:
            starts = [s for s in range(n_sentences - length + 1) if not any(taken[s:s + length])]
            if starts:
                break
            length -= 1
        if not starts:
            break
        start = rng.choice(starts)
        windows.append((start, start + length))
        for i in range(start, start + length):
            taken[i] = True
    return sorted(windows)


def backtranslate_sentences(
    doc: Document,
    max_windows: int = 3,
    max_window_len: int = 5,
    client: GenerationClient | None = None,
    seed: int = 0,
) -> PerturbationResult:
    """Back-translate disjoint windows of contiguous sentences."""
    params = resolve_params("sent_backtrans", {"max_windows": max_windows, "max_window_len": max_window_len})
    spans = require_text(doc)
    if client is None:
        raise ValueError("sent_backtrans requires a generation client")
    sentences = spans.sentence_spans
    if not sentences:
        raise ValueError(f"document {doc.id!r} has no sentences")
    rng = doc_rng(seed, doc.id)
    windows = _pick_windows(rng, len(sentences), params["max_windows"], params["max_window_len"])
    char_spans = [(sentences[a][0], sentences[b - 1][1]) for a, b in windows]
    originals = [doc.text[s:e] for s, e in char_spans]
    with _tagged("sent_backtrans"):
        pivoted = client.translate(originals, "en", "fr")
        restored = client.translate(pivoted, "fr", "en")
    edits = [Edit(s, e, out, "sent_backtrans") for (s, e), out in zip(char_spans, restored)]
    return finalize(doc, "sent_backtrans", edits, seed, params, [])


def mlm_sentences(
    doc: Document,
    min_masked: int = 2,
    max_masked: int = 5,
    client: GenerationClient | None = None,
    seed: int = 0,
) -> PerturbationResult:
    """Mask whole sentences and replace them with the client's fills."""
    params = resolve_params("sent_mlm", {"min_masked": min_masked, "max_masked": max_masked})
    spans = require_text(doc)
    if client is None:
        raise ValueError("sent_mlm requires a generation client")
    sentences = spans.sentence_spans
    if not sentences:
        raise ValueError(f"document {doc.id!r} has no sentences")
    rng = doc_rng(seed, doc.id)
    notes = []
    k = rng.randint(params["min_masked"], params["max_masked"])
    if k > len(sentences):
        k = len(sentences)
        notes.append(f"clamped:sentences={len(sentences)}")
    selected = sorted(rng.sample(range(len(sentences)), k))
    char_spans = [sentences[i] for i in selected]
    originals = [doc.text[s:e] for s, e in char_spans]
    masked = apply_edits(doc.text, [Edit(s, e, MASK_TOKEN, "sent_mlm") for s, e in char_spans])
    with _tagged("sent_mlm"):
        fills = client.fill_mask(masked, "sentence", originals)
    edits = [Edit(s, e, fill, "sent_mlm") for (s, e), fill in zip(char_spans, fills)]
    return finalize(doc, "sent_mlm", edits, seed, params, notes)


def mlm_words(
    doc: Document,
    max_ratio: float = 0.20,
    client: GenerationClient | None = None,
    seed: int = 0,
) -> PerturbationResult:
    """Mask up to floor(ratio * words) word tokens and take single-token fills."""
    params = resolve_params("word_mlm", {"max_ratio": max_ratio})
    spans = require_text(doc)
    if client is None:
        raise ValueError("word_mlm requires a generation client")
    words = spans.words()
    if not words:
        raise ValueError(f"document {doc.id!r} has no words")
    rng = doc_rng(seed, doc.id)
    cap = int(params["max_ratio"] * len(words))
    if cap == 0:
        return finalize(doc, "word_mlm", [], seed, params, ["no-candidates"])
    chosen = sorted(rng.sample(words, cap), key=lambda w: w.start)
    originals = [w.text(doc.text) for w in chosen]
    masked = apply_edits(doc.text, [Edit(w.start, w.end, MASK_TOKEN, "word_mlm") for w in chosen])
    with _tagged("word_mlm"):
        fills = client.fill_mask(masked, "word", originals)
    edits = [Edit(w.start, w.end, fill, "word_mlm") for w, fill in zip(chosen, fills)]
    return finalize(doc, "word_mlm", edits, seed, params, [])
