"""The HTTP service: six protocol endpoints plus /health.

Requests and responses are validated against the wire schemas shipped with
the client package, so compatibility is bit-exact by construction. Responses
for already-seen request_ids are served from a small cache, which makes
client retries idempotent.
"""

from __future__ import annotations

import threading
from collections import OrderedDict

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from perturbkit.errors import ProtocolError
from perturbkit.genclient import KINDS, request_key, validate_request_body, validate_response_body

from . import __version__
from .registry import ModelRegistry

DEFAULT_MAX_PENDING = 8
_CACHE_SIZE = 1024


class _IdempotencyCache:
    """Response cache keyed by request_id, guarded by the request content
    hash: a reused id with different content is treated as a fresh request
    rather than served someone else's answer."""

    def __init__(self, size: int = _CACHE_SIZE):
        self._data: OrderedDict[str, tuple[str, dict]] = OrderedDict()
        self._lock = threading.Lock()
        self._size = size

    def get(self, request_id: str, content_key: str) -> dict | None:
        with self._lock:
            entry = self._data.get(request_id)
            if entry is None or entry[0] != content_key:
                return None
            return entry[1]

    def put(self, request_id: str, content_key: str, body: dict) -> None:
        with self._lock:
            self._data[request_id] = (content_key, body)
            while len(self._data) > self._size:
                self._data.popitem(last=False)


def _run_backend(registry: ModelRegistry, kind: str, payload: dict):
    backend = registry.backends[kind]
    if kind == "paraphrase":
        return [backend(t, payload["lex"], payload["order"]) for t in payload["texts"]]
    if kind == "translate":
        return [backend(t, payload["source_lang"], payload["target_lang"]) for t in payload["texts"]]
    if kind == "fill_mask":
        return backend(payload["text"], payload["granularity"])
    if kind == "perplexity":
        return [backend(t) for t in payload["texts"]]
    if kind == "similarity":
        return backend(payload["text_a"], payload["text_b"])
    if kind == "judge":
        return backend(payload["texts"])
    raise ValueError(f"unknown kind {kind!r}")


def create_app(registry: ModelRegistry, max_pending: int = DEFAULT_MAX_PENDING) -> FastAPI:
    app = FastAPI(title="perturbkit-sidecar", version=__version__)
    cache = _IdempotencyCache()
    pending = threading.BoundedSemaphore(max_pending) if max_pending > 0 else None
    backend_calls = {"count": 0}
    app.state.backend_calls = backend_calls

    def handle(kind: str, body: dict) -> JSONResponse:
        try:
            validate_request_body(body)
        except ProtocolError as exc:
            return JSONResponse(status_code=422, content={"error": str(exc)})
        if body["kind"] != kind:
            return JSONResponse(status_code=422, content={"error": f"kind {body['kind']!r} posted to /{kind}"})
        request_id = body["request_id"]
        content_key = request_key(kind, body["payload"])
        cached = cache.get(request_id, content_key)
        if cached is not None:
            return JSONResponse(status_code=200, content=cached)

        if pending is None or not pending.acquire(blocking=False):
            return JSONResponse(status_code=429, content={"error": "overloaded"}, headers={"Retry-After": "1"})
        try:
            if not registry.readiness().get(kind, False):
                return JSONResponse(status_code=503, content={"error": f"{kind} backend unavailable"})
            lock = registry.locks.get(kind)
            backend_calls["count"] += 1
            if lock is not None:
                with lock:
                    output = _run_backend(registry, kind, body["payload"])
            else:
                output = _run_backend(registry, kind, body["payload"])
        except Exception as exc:
            return JSONResponse(status_code=500, content={"error": f"{kind} backend failed: {exc}"})
        finally:
            pending.release()

        response_body = {"request_id": request_id, "output": output, "model_tag": registry.model_tag(kind)}
        try:
            validate_response_body(kind, response_body)
        except ProtocolError as exc:
            return JSONResponse(status_code=500, content={"error": f"backend produced invalid output: {exc}"})
        cache.put(request_id, content_key, response_body)
        return JSONResponse(status_code=200, content=response_body)

    def make_endpoint(kind: str):
        async def endpoint(request: Request) -> JSONResponse:
            body = await request.json()
            return handle(kind, body)
        return endpoint

    for kind in KINDS:
        app.post(f"/{kind}")(make_endpoint(kind))

    @app.get("/health")
    async def health() -> dict:
        return {
            "status": "ok",
            "version": __version__,
            "fake_mode": registry.fake_mode,
            "kinds": registry.readiness(),
        }

    return app
