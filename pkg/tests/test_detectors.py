import json
import random

import httpx
import pytest

from perturbkit.detectors import (
    DetectorFailure,
    DetectorScore,
    build_index,
    external_detect,
    index_tokens,
    rerank_score,
    retrieval_score,
)
from perturbkit.errors import ProtocolError
from perturbkit.genclient import GenerationClient, GenResponse
from perturbkit.perturb import PerturbationSpec, apply

from conftest import make_corpus, make_doc, make_text


class TestIndexBuild:
    def test_df_bound(self):
        index = build_index(["the cat sat", "the dog ran"])
        assert len(index.postings["the"]) <= 2
        assert len(index.postings["cat"]) == 1

    def test_empty_corpus_scores_zero(self):
        index = build_index([])
        assert retrieval_score(index, "anything at all").score == 0.0

    def test_duplicates_count_as_multiset(self):
        index = build_index(["same text here", "same text here"])
        assert index.size == 2
        assert len(index.postings["same"]) == 2

    def test_tokenization_lowercases_and_drops_punct(self):
        assert index_tokens("The CAT, sat!") == ["the", "cat", "sat"]


class TestRetrievalScore:
    def test_exact_duplicate_scores_one(self, rng):
        corpus = [make_text(rng, 30) for _ in range(50)]
        index = build_index(corpus)
        for query in corpus[:10]:
            assert retrieval_score(index, query).score == pytest.approx(1.0)

    def test_no_shared_terms_scores_zero(self, rng):
        index = build_index([make_text(rng, 30) for _ in range(10)])
        assert retrieval_score(index, "zzzz qqqq xxxx").score == 0.0

    def test_empty_query_rejected(self):
        index = build_index(["some words"])
        with pytest.raises(ValueError):
            retrieval_score(index, "... !!!")

    def test_self_retrieval_top1(self, rng):
        corpus = [make_text(rng, 40) for _ in range(60)]
        index = build_index(corpus)
        for idx in (0, 7, 33):
            scores = index.scores_for(index_tokens(corpus[idx]))
            best_idx = max(scores, key=lambda i: scores[i])
            assert scores[best_idx] <= scores[idx] + 1e-12

    def test_monotone_in_term_overlap(self):
        # single-term synthetic docs: more shared terms never lowers the score
        corpus = ["alpha beta gamma delta epsilon"]
        index = build_index(corpus * 3 + ["unrelated words entirely different"])
        prev = 0.0
        terms = ["alpha", "beta", "gamma", "delta", "epsilon"]
        for k in range(1, 6):
            score = retrieval_score(index, " ".join(terms[:k])).score
            assert score >= prev - 1e-12
            prev = score

    def test_char_perturbed_copy_beats_disjoint_corpus(self, rng):
        # 100-doc corpus; a punctuation-stripped copy of an indexed doc scores
        # far above the same query against an unrelated corpus
        docs = make_corpus(rng, 100, 40)
        index = build_index([d.text for d in docs], source_tag="train+test")
        victim = docs[3]
        perturbed = apply(victim, PerturbationSpec(operator="punct_remove", seed=1)).perturbed_text
        score_in = retrieval_score(index, perturbed).score
        other_vocab = [f"tok{i}" for i in range(60)]
        disjoint = build_index([" ".join(random.Random(i).choices(other_vocab, k=40)) for i in range(100)])
        score_out = retrieval_score(disjoint, perturbed).score
        assert score_in > score_out
        assert score_in > 0.95

    def test_scoring_does_not_mutate_index(self, rng):
        corpus = [make_text(rng, 30) for _ in range(20)]
        index = build_index(corpus)
        before = (dict(index.postings["the"]) if "the" in index.postings else {}, index.avg_doc_length)
        first = retrieval_score(index, corpus[0]).score
        for _ in range(5):
            assert retrieval_score(index, corpus[0]).score == first
        after = (dict(index.postings["the"]) if "the" in index.postings else {}, index.avg_doc_length)
        assert before == after

    def test_adding_queries_drives_scores_to_one(self, rng):
        queries = [make_text(rng, 30) for _ in range(20)]
        base = [make_text(rng, 30) for _ in range(80)]
        without = build_index(base, source_tag="train")
        with_queries = build_index(base + queries, source_tag="train+test")
        mean_without = sum(retrieval_score(without, q).score for q in queries) / len(queries)
        mean_with = sum(retrieval_score(with_queries, q).score for q in queries) / len(queries)
        assert mean_with == pytest.approx(1.0)
        assert mean_without < 1.0


class TestRerank:
    def test_semantic_rescoring_uses_top_candidates(self, rng):
        corpus = [make_text(rng, 30) for _ in range(30)]

        class JaccardStub(GenerationClient):
            def request(self, req):
                a = set(req.payload["text_a"].split())
                b = set(req.payload["text_b"].split())
                return GenResponse(req.request_id, len(a & b) / len(a | b), "stub:jaccard")

        score = rerank_score(build_index(corpus), corpus[5], JaccardStub(), k=5)
        assert score.score == pytest.approx(1.0)
        assert score.detector_tag.startswith("bm25-rerank")


class TestExternalDetect:
    def _transport(self, scores):
        def handler(request: httpx.Request) -> httpx.Response:
            body = json.loads(request.content)
            assert request.url.path == "/detect"
            return httpx.Response(200, json={"scores": scores(body["texts"])})
        return httpx.MockTransport(handler)

    def test_constant_stub(self):
        transport = self._transport(lambda texts: [0.5] * len(texts))
        out = external_detect("http://det", ["a", "b", "c"], doc_ids=["1", "2", "3"], transport=transport)
        assert [s.score for s in out] == [0.5, 0.5, 0.5]
        assert [s.doc_id for s in out] == ["1", "2", "3"]

    def test_out_of_range_score_is_protocol_error(self):
        transport = self._transport(lambda texts: [1.7] * len(texts))
        with pytest.raises(ProtocolError):
            external_detect("http://det", ["a"], transport=transport)

    def test_order_preserved_large_batch(self):
        transport = self._transport(lambda texts: [round(len(t) / 100, 6) for t in texts])
        texts = ["x" * i for i in range(1, 41)]
        out = external_detect("http://det", texts, transport=transport)
        assert len(out) == 40
        assert [s.score for s in out] == [round(i / 100, 6) for i in range(1, 41)]

    def test_per_text_null_becomes_failure_record(self):
        transport = self._transport(lambda texts: [0.2, None, 0.4])
        out = external_detect("http://det", ["a", "b", "c"], doc_ids=["1", "2", "3"], transport=transport)
        assert isinstance(out[1], DetectorFailure)
        assert isinstance(out[0], DetectorScore) and isinstance(out[2], DetectorScore)


class TestDetectorScore:
    def test_range_enforced(self):
        with pytest.raises(ValueError):
            DetectorScore(doc_id="x", score=1.2, detector_tag="t")
