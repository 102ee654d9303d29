"""Detector abstraction: every detector maps a text to a score in [0, 1],
higher meaning more likely AI-generated.

The native detector retrieves the best-matching document from a BM25 corpus
index and normalizes by the query's self-score, so an exact duplicate of an
indexed document scores 1.0. Because indexing lowercases and drops
punctuation, character-level noise is nearly invisible to it, while full
rewrites are not. Absolute scores are a property of this normalization and
are not comparable to other BM25 setups.

External detectors are reached over HTTP: POST /detect {"texts": [...]} ->
{"scores": [...]}, scores validated into [0, 1] (never silently clamped).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import httpx

from .errors import ProtocolError, ServiceError, TransportError
from .genclient import GenerationClient
from .textseg import tokenize

CORPUS_SOURCES = ("train", "train+test", "external", "external+test")

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75


@dataclass(frozen=True)
class DetectorScore:
    doc_id: str
    score: float
    detector_tag: str

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must be in [0, 1], got {self.score}")


@dataclass(frozen=True)
class DetectorFailure:
    """Per-text error record from an external detector; the batch continues."""

    doc_id: str
    detector_tag: str
    error: str


def index_tokens(text: str) -> list[str]:
    """Lowercased word tokens; punctuation and whitespace dropped."""
    spans = tokenize(text)
    return [text[s.start:s.end].lower() for s in spans.token_spans if s.kind == "word"]


@dataclass(frozen=True)
class CorpusIndex:
    """Immutable BM25 inverted index over a corpus of texts."""

    documents: tuple[str, ...]
    source_tag: str
    k1: float
    b: float
    postings: dict[str, dict[int, int]] = field(repr=False)  # term -> {doc: tf}
    doc_lengths: tuple[int, ...] = field(repr=False)
    avg_doc_length: float = 0.0

    @property
    def size(self) -> int:
        return len(self.documents)

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        return math.log(1.0 + (self.size - df + 0.5) / (df + 0.5))

    def _term_weight(self, tf: int, doc_length: int) -> float:
        norm = self.k1 * (1.0 - self.b + self.b * doc_length / self.avg_doc_length)
        return tf * (self.k1 + 1.0) / (tf + norm)

    def scores_for(self, query_tokens: list[str]) -> dict[int, float]:
        """BM25 score of the query against every corpus doc sharing a term."""
        counts = Counter(query_tokens)
        scores: dict[int, float] = {}
        for term, qtf in counts.items():
            posting = self.postings.get(term)
            if not posting:
                continue
            idf = self.idf(term)
            for doc_idx, tf in posting.items():
                scores[doc_idx] = scores.get(doc_idx, 0.0) + idf * self._term_weight(tf, self.doc_lengths[doc_idx])
        return scores

    def self_score(self, query_tokens: list[str]) -> float:
        """BM25 of the query against itself under this index's statistics."""
        counts = Counter(query_tokens)
        length = len(query_tokens)
        return sum(self.idf(t) * self._term_weight(tf, length) for t, tf in counts.items())

    def top_k(self, query: str, k: int = 5) -> list[tuple[int, float]]:
        scores = self.scores_for(index_tokens(query))
        ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
        return ranked[:k]


def build_index(
    corpus: list[str],
    source_tag: str = "train",
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> CorpusIndex:
    """Index a corpus (possibly empty; duplicates count as separate docs)."""
    postings: dict[str, dict[int, int]] = {}
    lengths: list[int] = []
    for doc_idx, text in enumerate(corpus):
        tokens = index_tokens(text)
        lengths.append(len(tokens))
        for term, tf in Counter(tokens).items():
            postings.setdefault(term, {})[doc_idx] = tf
    avg = (sum(lengths) / len(lengths)) if lengths else 0.0
    return CorpusIndex(
        documents=tuple(corpus),
        source_tag=source_tag,
        k1=k1,
        b=b,
        postings=postings,
        doc_lengths=tuple(lengths),
        avg_doc_length=avg,
    )


def retrieval_score(index: CorpusIndex, query: str, doc_id: str = "") -> DetectorScore:
    """Best-match BM25 over self-score, clamped to [0, 1].

    An exact duplicate of an indexed document scores exactly 1.0; a query
    sharing no terms with the corpus scores 0.0.
    """
    tokens = index_tokens(query)
    if not tokens:
        raise ValueError("query has no word tokens")
    tag = f"bm25-{index.source_tag}"
    if index.size == 0 or index.avg_doc_length == 0:
        return DetectorScore(doc_id=doc_id, score=0.0, detector_tag=tag)
    scores = index.scores_for(tokens)
    if not scores:
        return DetectorScore(doc_id=doc_id, score=0.0, detector_tag=tag)
    best = max(scores.values())
    denom = index.self_score(tokens)
    ratio = best / denom if denom > 0 else 0.0
    return DetectorScore(doc_id=doc_id, score=min(max(ratio, 0.0), 1.0), detector_tag=tag)


def rerank_score(
    index: CorpusIndex,
    query: str,
    client: GenerationClient,
    k: int = 5,
    doc_id: str = "",
) -> DetectorScore:
    """Semantic variant: rescore the top-k BM25 candidates with the
    similarity endpoint and keep the maximum."""
    tag = f"bm25-rerank-{index.source_tag}"
    candidates = index.top_k(query, k)
    if not candidates:
        return DetectorScore(doc_id=doc_id, score=0.0, detector_tag=tag)
    best = max(client.similarity(query, index.documents[i]) for i, _ in candidates)
    return DetectorScore(doc_id=doc_id, score=min(max(best, 0.0), 1.0), detector_tag=tag)


def external_detect(
    endpoint: str,
    texts: list[str],
    doc_ids: list[str] | None = None,
    detector_tag: str = "external",
    timeout: float = 60.0,
    batch_size: int = 32,
    transport: httpx.BaseTransport | None = None,
) -> list[DetectorScore | DetectorFailure]:
    """Score a batch via the external detector protocol, order-preserving.

    A null in the scores array marks a per-text service failure; it becomes a
    DetectorFailure record while the rest of the batch proceeds. Out-of-range
    scores are a protocol violation, not something to clamp.
    """
    if doc_ids is None:
        doc_ids = [""] * len(texts)
    if len(doc_ids) != len(texts):
        raise ValueError("doc_ids and texts must have equal length")
    results: list[DetectorScore | DetectorFailure] = []
    with httpx.Client(base_url=endpoint.rstrip("/"), timeout=timeout, transport=transport) as client:
        for start in range(0, len(texts), batch_size):
            chunk = texts[start:start + batch_size]
            ids = doc_ids[start:start + batch_size]
            try:
                resp = client.post("/detect", json={"texts": chunk})
            except (httpx.TimeoutException, httpx.TransportError) as exc:
                raise TransportError(f"detector {detector_tag} unreachable: {exc}") from exc
            if not (200 <= resp.status_code < 300):
                raise ServiceError(resp.status_code, resp.text[:200])
            data = resp.json()
            scores = data.get("scores")
            if not isinstance(scores, list) or len(scores) != len(chunk):
                raise ProtocolError(f"detector returned {scores!r} for {len(chunk)} texts")
            for doc_id, value in zip(ids, scores):
                if value is None:
                    results.append(DetectorFailure(doc_id=doc_id, detector_tag=detector_tag, error="service reported failure"))
                    continue
                if not isinstance(value, (int, float)) or not 0.0 <= float(value) <= 1.0:
                    raise ProtocolError(f"detector score {value!r} outside [0, 1]")
                results.append(DetectorScore(doc_id=doc_id, score=float(value), detector_tag=detector_tag))
    return results
