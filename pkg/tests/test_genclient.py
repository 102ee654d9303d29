import json

import httpx
import pytest

from perturbkit.errors import ProtocolError, ReplayMissError, ServiceError, TransportError
from perturbkit.genclient import (
    BATCH_LIMIT,
    MASK_TOKEN,
    DictionaryStub,
    GenRequest,
    GenResponse,
    HttpGenClient,
    IdentityStub,
    RecordingClient,
    load_wire_schemas,
    request_key,
    stub_client,
    validate_request_body,
    validate_response_body,
)


class TestIdentityStub:
    def test_paraphrase_echo(self):
        client = stub_client("identity")
        assert client.paraphrase(["hello world"]) == ["hello world"]

    def test_translate_echo(self):
        client = stub_client("identity")
        assert client.translate(["bonjour"], "en", "fr") == ["bonjour"]

    def test_fill_mask_returns_originals(self):
        client = stub_client("identity")
        fills = client.fill_mask(f"The {MASK_TOKEN} sat on the {MASK_TOKEN}.", "word", ["cat", "mat"])
        assert fills == ["cat", "mat"]

    def test_similarity_is_one(self):
        client = stub_client("identity")
        assert client.similarity("a", "a") == pytest.approx(1.0, abs=1e-6)

    def test_judge_scores_in_range(self):
        client = stub_client("identity")
        scores = client.judge(["x"] * 13)
        assert len(scores) == 13
        assert all(isinstance(s, int) and 1 <= s <= 10 for s in scores)


class TestDictionaryStub:
    def test_served_response(self):
        stub = DictionaryStub()
        stub.add("paraphrase", {"texts": ["abc"], "lex": 40, "order": 40}, ["xyz"])
        assert stub.paraphrase(["abc"]) == ["xyz"]

    def test_strict_miss_raises(self):
        stub = DictionaryStub(strict=True)
        with pytest.raises(ReplayMissError):
            stub.paraphrase(["abc"])

    def test_non_strict_falls_back_to_identity(self):
        stub = DictionaryStub(strict=False)
        assert stub.paraphrase(["abc"]) == ["abc"]


class TestRecordedStub:
    def test_replay_bit_identical(self, tmp_path):
        capture = tmp_path / "session.jsonl"
        req = GenRequest("similarity", {"text_a": "a", "text_b": "b"}, "req-1")
        resp = GenResponse("req-1", 0.25, "model-z")
        capture.write_text(json.dumps({"request": req.body(), "response": resp.body()}) + "\n")
        client = stub_client("recorded", path=capture)
        assert client.similarity("a", "b") == 0.25

    def test_replay_miss(self, tmp_path):
        capture = tmp_path / "empty.jsonl"
        capture.write_text("")
        client = stub_client("recorded", path=capture)
        with pytest.raises(ReplayMissError):
            client.similarity("a", "b")

    def test_shipped_session_replays(self):
        from pathlib import Path
        capture = Path(__file__).parent / "data" / "recorded_session.jsonl"
        client = stub_client("recorded", path=capture)
        pairs = [json.loads(line) for line in capture.read_text().splitlines() if line.strip()]
        assert {p["request"]["kind"] for p in pairs} == {
            "paraphrase", "translate", "fill_mask", "perplexity", "similarity", "judge"}
        for pair in pairs:
            req = pair["request"]
            resp = client.request(GenRequest(req["kind"], req["payload"], "req-replay"))
            assert resp.output == pair["response"]["output"]
            assert resp.model_tag == pair["response"]["model_tag"]


class TestRecording:
    def test_capture_then_replay(self, tmp_path):
        capture = tmp_path / "cap.jsonl"
        rec = RecordingClient(IdentityStub(), capture)
        rec.paraphrase(["alpha beta"])
        rec.similarity("x", "x")
        replay = stub_client("recorded", path=capture)
        assert replay.paraphrase(["alpha beta"]) == ["alpha beta"]
        assert replay.similarity("x", "x") == 1.0


class TestValidation:
    def test_schemas_cover_all_kinds(self):
        schemas = load_wire_schemas()
        assert set(schemas) == {"paraphrase", "translate", "fill_mask", "perplexity", "similarity", "judge"}
        for kind in schemas:
            assert set(schemas[kind]) == {"request", "response"}

    def test_empty_text_rejected_before_any_call(self):
        client = stub_client("identity")
        with pytest.raises(ValueError):
            client.paraphrase([""])
        with pytest.raises(ValueError):
            client.paraphrase([])

    def test_bad_similarity_payload(self):
        with pytest.raises(ProtocolError):
            validate_request_body({"kind": "similarity", "payload": {"text_a": "x"}, "request_id": "r"})

    def test_out_of_range_judge_response(self):
        with pytest.raises(ProtocolError):
            validate_response_body("judge", {"request_id": "r", "output": [0], "model_tag": "m"})

    def test_nonpositive_perplexity_response(self):
        with pytest.raises(ProtocolError):
            validate_response_body("perplexity", {"request_id": "r", "output": [0.0], "model_tag": "m"})

    def test_fill_mask_count_mismatch(self):
        stub = DictionaryStub()
        stub.add("fill_mask", {"text": f"a {MASK_TOKEN} b", "granularity": "word", "originals": ["x"]}, ["f1", "f2"])
        with pytest.raises(ProtocolError):
            stub.fill_mask(f"a {MASK_TOKEN} b", "word", ["x"])

    def test_request_key_ignores_request_id(self):
        a = request_key("similarity", {"text_a": "1", "text_b": "2"})
        b = request_key("similarity", {"text_a": "1", "text_b": "2"})
        assert a == b

    def test_batch_chunking(self):
        stub = stub_client("identity")
        texts = [f"t{i}" for i in range(BATCH_LIMIT + 5)]
        assert stub.paraphrase(texts) == texts


def _transport(handler):
    return httpx.MockTransport(handler)


class TestHttpClient:
    def test_round_trip(self):
        def handler(request: httpx.Request) -> httpx.Response:
            body = json.loads(request.content)
            assert request.url.path == "/similarity"
            return httpx.Response(200, json={"request_id": body["request_id"], "output": 0.5, "model_tag": "m"})

        client = HttpGenClient("http://sidecar", transport=_transport(handler))
        assert client.similarity("a", "b") == 0.5

    def test_non_2xx_raises_service_error_with_excerpt(self):
        def handler(request):
            return httpx.Response(500, text="boom goes the model")

        client = HttpGenClient("http://sidecar", transport=_transport(handler))
        with pytest.raises(ServiceError, match="boom"):
            client.similarity("a", "b")

    def test_schema_violation_raises_protocol_error(self):
        def handler(request):
            return httpx.Response(200, json={"request_id": "r", "output": 1.5, "model_tag": "m"})

        client = HttpGenClient("http://sidecar", transport=_transport(handler))
        with pytest.raises(ProtocolError):
            client.similarity("a", "b")

    def test_timeout_retried_then_transport_error(self):
        attempts = []

        def handler(request):
            attempts.append(1)
            raise httpx.ConnectTimeout("slow")

        client = HttpGenClient("http://sidecar", retries=2, backoff=0.0, transport=_transport(handler))
        with pytest.raises(TransportError):
            client.similarity("a", "b")
        assert len(attempts) == 3

    def test_request_id_stable_across_retries(self):
        seen = []

        def handler(request):
            body = json.loads(request.content)
            seen.append(body["request_id"])
            if len(seen) < 2:
                raise httpx.ConnectError("refused")
            return httpx.Response(200, json={"request_id": body["request_id"], "output": 0.1, "model_tag": "m"})

        client = HttpGenClient("http://sidecar", retries=2, backoff=0.0, transport=_transport(handler))
        client.similarity("a", "b")
        assert len(set(seen)) == 1

    def test_429_is_retried(self):
        calls = []

        def handler(request):
            calls.append(1)
            if len(calls) == 1:
                return httpx.Response(429, text="busy", headers={"Retry-After": "0"})
            body = json.loads(request.content)
            return httpx.Response(200, json={"request_id": body["request_id"], "output": 0.3, "model_tag": "m"})

        client = HttpGenClient("http://sidecar", retries=1, backoff=0.0, transport=_transport(handler))
        assert client.similarity("a", "b") == 0.3
