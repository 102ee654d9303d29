"""Client side of the neural generation/scoring wire protocol.

Six JSON-over-HTTP POST endpoints (one per request kind) plus in-process stub
clients so the whole perturbation and quality stack can run without any model:

- identity: echoes inputs (neural perturbations become no-ops),
- dictionary: canned outputs keyed by a request hash,
- recorded: bit-exact replay of a captured session file.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import threading
import time
import uuid
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import httpx
import jsonschema

from .errors import ProtocolError, ReplayMissError, ServiceError, TransportError

KINDS = ("paraphrase", "translate", "fill_mask", "perplexity", "similarity", "judge")
MASK_TOKEN = "<|mask|>"
BATCH_LIMIT = 32

DEFAULT_TIMEOUT = 120.0
DEFAULT_RETRIES = 2
DEFAULT_MAX_IN_FLIGHT = 4


@dataclass(frozen=True)
class GenRequest:
    kind: str
    payload: dict
    request_id: str

    def body(self) -> dict:
        return {"kind": self.kind, "payload": self.payload, "request_id": self.request_id}


@dataclass(frozen=True)
class GenResponse:
    request_id: str
    output: Any
    model_tag: str

    def body(self) -> dict:
        return {"request_id": self.request_id, "output": self.output, "model_tag": self.model_tag}


def load_wire_schemas() -> dict:
    """The shared request/response JSON schemas, one pair per kind."""
    text = resources.files("perturbkit.schemas").joinpath("wire.json").read_text(encoding="utf-8")
    return json.loads(text)


_SCHEMAS = load_wire_schemas()

# validators are compiled once; jsonschema.validate would rebuild per call
_REQUEST_VALIDATORS = {k: jsonschema.Draft202012Validator(v["request"]) for k, v in _SCHEMAS.items()}
_RESPONSE_VALIDATORS = {k: jsonschema.Draft202012Validator(v["response"]) for k, v in _SCHEMAS.items()}


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def request_key(kind: str, payload: dict) -> str:
    """Stable lookup key for stub/replay clients; ignores request_id."""
    digest = hashlib.sha256(canonical_json({"kind": kind, "payload": payload}).encode("utf-8"))
    return digest.hexdigest()


def validate_request_body(body: dict) -> None:
    kind = body.get("kind")
    if kind not in KINDS:
        raise ProtocolError(f"unknown request kind {kind!r}")
    error = next(_REQUEST_VALIDATORS[kind].iter_errors(body), None)
    if error is not None:
        raise ProtocolError(f"{kind} request violates wire schema: {error.message}")


def validate_response_body(kind: str, body: dict) -> None:
    error = next(_RESPONSE_VALIDATORS[kind].iter_errors(body), None)
    if error is not None:
        raise ProtocolError(f"{kind} response violates wire schema: {error.message}")


def _require_texts(texts: list[str]) -> None:
    if not texts:
        raise ValueError("texts must be non-empty")
    for t in texts:
        if not t:
            raise ValueError("every text must be non-empty")


class GenerationClient:
    """Semantic wrapper over the wire protocol.

    Subclasses implement ``request``; all payload construction, chunking, and
    kind-specific output validation lives here so every client (HTTP or stub)
    honors the same contract.
    """

    def __init__(self) -> None:
        self._counter = itertools.count(1)
        self._id_lock = threading.Lock()
        # ids must be unique across client instances: a long-lived server may
        # deduplicate on request_id, so bare counters would collide
        self._id_prefix = uuid.uuid4().hex[:12]

    def request(self, req: GenRequest) -> GenResponse:
        raise NotImplementedError

    def _next_request_id(self) -> str:
        with self._id_lock:
            return f"req-{self._id_prefix}-{next(self._counter):06d}"

    def _call(self, kind: str, payload: dict) -> Any:
        req = GenRequest(kind=kind, payload=payload, request_id=self._next_request_id())
        validate_request_body(req.body())
        resp = self.request(req)
        validate_response_body(kind, resp.body())
        return resp.output

    def _batched_texts(self, kind: str, texts: list[str], extra: dict) -> list:
        out: list = []
        for i in range(0, len(texts), BATCH_LIMIT):
            chunk = texts[i:i + BATCH_LIMIT]
            output = self._call(kind, {"texts": chunk, **extra})
            if not isinstance(output, list) or len(output) != len(chunk):
                raise ProtocolError(f"{kind} returned {len(output) if isinstance(output, list) else 'non-list'} outputs for {len(chunk)} texts")
            out.extend(output)
        return out

    def paraphrase(self, texts: list[str], lex: int = 40, order: int = 40) -> list[str]:
        _require_texts(texts)
        return self._batched_texts("paraphrase", texts, {"lex": lex, "order": order})

    def translate(self, texts: list[str], source_lang: str, target_lang: str) -> list[str]:
        _require_texts(texts)
        return self._batched_texts("translate", texts, {"source_lang": source_lang, "target_lang": target_lang})

    def fill_mask(self, text: str, granularity: str, originals: list[str]) -> list[str]:
        """One completion per mask token in ``text``, in occurrence order."""
        if not text:
            raise ValueError("text must be non-empty")
        n_masks = text.count(MASK_TOKEN)
        if n_masks == 0:
            raise ValueError("text contains no mask token")
        if len(originals) != n_masks:
            raise ValueError(f"{len(originals)} originals for {n_masks} masks")
        output = self._call("fill_mask", {"text": text, "granularity": granularity, "originals": originals})
        if len(output) != n_masks:
            raise ProtocolError(f"fill_mask returned {len(output)} fills for {n_masks} masks")
        return output

    def perplexity(self, texts: list[str]) -> list[float]:
        _require_texts(texts)
        return [float(v) for v in self._batched_texts("perplexity", texts, {})]

    def similarity(self, text_a: str, text_b: str) -> float:
        if not text_a or not text_b:
            raise ValueError("similarity texts must be non-empty")
        return float(self._call("similarity", {"text_a": text_a, "text_b": text_b}))

    def judge(self, texts: list[str], prompt_id: str = "writing-quality-v1") -> list[int]:
        _require_texts(texts)
        if len(texts) > BATCH_LIMIT:
            raise ValueError(f"judge batch exceeds wire limit of {BATCH_LIMIT}")
        output = self._call("judge", {"texts": texts, "prompt_id": prompt_id})
        if len(output) != len(texts):
            raise ProtocolError(f"judge returned {len(output)} scores for {len(texts)} texts")
        return [int(v) for v in output]


class HttpGenClient(GenerationClient):
    """JSON-over-HTTP client with bounded in-flight requests and retries.

    Timeouts and connection failures are retried with exponential backoff
    (request_id stays stable so the server may deduplicate); non-2xx answers
    raise ServiceError with a body excerpt, except 429 which is retried.
    """

    def __init__(
        self,
        endpoint: str,
        timeout: float = DEFAULT_TIMEOUT,
        retries: int = DEFAULT_RETRIES,
        backoff: float = 0.5,
        max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
        transport: httpx.BaseTransport | None = None,
    ) -> None:
        super().__init__()
        if timeout <= 0:
            raise ValueError("timeout must be positive")
        self.endpoint = endpoint.rstrip("/")
        self._retries = retries
        self._backoff = backoff
        self._sema = threading.BoundedSemaphore(max_in_flight)
        self._client = httpx.Client(base_url=self.endpoint, timeout=timeout, transport=transport)

    def close(self) -> None:
        self._client.close()

    def request(self, req: GenRequest) -> GenResponse:
        last_exc: Exception | None = None
        for attempt in range(self._retries + 1):
            if attempt:
                time.sleep(self._backoff * (2 ** (attempt - 1)))
            try:
                with self._sema:
                    resp = self._client.post(f"/{req.kind}", json=req.body())
            except (httpx.TimeoutException, httpx.TransportError) as exc:
                last_exc = exc
                continue
            if resp.status_code == 429:
                last_exc = ServiceError(429, resp.text[:200])
                retry_after = resp.headers.get("Retry-After")
                if retry_after:
                    try:
                        time.sleep(min(float(retry_after), 5.0))
                    except ValueError:
                        pass
                continue
            if not (200 <= resp.status_code < 300):
                raise ServiceError(resp.status_code, resp.text[:200])
            try:
                data = resp.json()
            except json.JSONDecodeError as exc:
                raise ProtocolError(f"{req.kind} response is not JSON: {exc}") from exc
            validate_response_body(req.kind, data)
            return GenResponse(request_id=data["request_id"], output=data["output"], model_tag=data["model_tag"])
        raise TransportError(f"{req.kind} request failed after {self._retries + 1} attempts: {last_exc}") from last_exc


class IdentityStub(GenerationClient):
    """Echo client: every neural perturbation becomes a no-op."""

    model_tag = "stub:identity"

    def request(self, req: GenRequest) -> GenResponse:
        p = req.payload
        if req.kind in ("paraphrase", "translate"):
            output: Any = list(p["texts"])
        elif req.kind == "fill_mask":
            output = list(p.get("originals", []))
        elif req.kind == "perplexity":
            output = [1.0] * len(p["texts"])
        elif req.kind == "similarity":
            output = 1.0
        elif req.kind == "judge":
            output = [10] * len(p["texts"])
        else:
            raise ProtocolError(f"unknown kind {req.kind!r}")
        return GenResponse(request_id=req.request_id, output=output, model_tag=self.model_tag)


class DictionaryStub(GenerationClient):
    """Serves canned outputs keyed by request_key(kind, payload).

    In strict mode a miss raises ReplayMissError; otherwise it falls back to
    identity behavior.
    """

    model_tag = "stub:dictionary"

    def __init__(self, responses: dict[str, Any] | None = None, strict: bool = True) -> None:
        super().__init__()
        self._responses = dict(responses or {})
        self._strict = strict
        self._fallback = IdentityStub()

    def add(self, kind: str, payload: dict, output: Any) -> None:
        self._responses[request_key(kind, payload)] = output

    def request(self, req: GenRequest) -> GenResponse:
        key = request_key(req.kind, req.payload)
        if key in self._responses:
            return GenResponse(request_id=req.request_id, output=self._responses[key], model_tag=self.model_tag)
        if self._strict:
            raise ReplayMissError(f"no canned response for {req.kind} request {key[:12]}")
        return self._fallback.request(req)


class RecordedStub(GenerationClient):
    """Replays a capture file (JSONL of request/response pairs) bit-exactly."""

    def __init__(self, path: str | Path) -> None:
        super().__init__()
        self._responses: dict[str, dict] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                pair = json.loads(line)
                key = request_key(pair["request"]["kind"], pair["request"]["payload"])
                self._responses[key] = pair["response"]

    def request(self, req: GenRequest) -> GenResponse:
        key = request_key(req.kind, req.payload)
        if key not in self._responses:
            raise ReplayMissError(f"capture has no response for {req.kind} request {key[:12]}")
        body = self._responses[key]
        return GenResponse(request_id=req.request_id, output=body["output"], model_tag=body["model_tag"])


class RecordingClient(GenerationClient):
    """Wraps another client and appends request/response pairs to a capture file."""

    def __init__(self, inner: GenerationClient, path: str | Path) -> None:
        super().__init__()
        self._inner = inner
        self._path = Path(path)
        self._lock = threading.Lock()

    def request(self, req: GenRequest) -> GenResponse:
        resp = self._inner.request(req)
        line = json.dumps({"request": req.body(), "response": resp.body()}, ensure_ascii=False)
        with self._lock:
            with open(self._path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
        return resp


def stub_client(
    mode: str,
    responses: dict[str, Any] | None = None,
    path: str | Path | None = None,
    strict: bool = True,
) -> GenerationClient:
    """Factory for the three stub modes: identity, dictionary, recorded."""
    if mode == "identity":
        return IdentityStub()
    if mode == "dictionary":
        return DictionaryStub(responses=responses, strict=strict)
    if mode == "recorded":
        if path is None:
            raise ValueError("recorded mode requires a capture path")
        return RecordedStub(path)
    raise ValueError(f"unknown stub mode {mode!r}")
