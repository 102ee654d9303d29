"""Regenerate the shared recorded-session fixture from the fake sidecar.

Run from the repository root:
    python sidecar/scripts/record_session.py

The output (tests/data/recorded_session.jsonl) is replayed by the client
suite's recorded-stub tests and asserted bit-equal by the sidecar contract
tests, so regenerate it whenever the fake backends change.
"""

from __future__ import annotations

import sys
import threading
import time
from pathlib import Path

import uvicorn

from perturbkit.genclient import MASK_TOKEN, HttpGenClient, RecordingClient
from perturbkit_sidecar.registry import build_registry
from perturbkit_sidecar.service import create_app

OUT_PATH = Path(__file__).resolve().parents[2] / "tests" / "data" / "recorded_session.jsonl"

SAMPLE = (
    "In this paper, we explore grand unified theories that utilize an "
    "SU(5)xSU(5) gauge group. Our focus is on preventing fast proton decay "
    "through a combination of small triplet couplings and a large triplet mass."
)
SECOND = "The results show that small couplings keep the model stable."


def start_server():
    registry = build_registry(fake_mode=True)
    app = create_app(registry)
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    while not server.started:
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    return server, thread, f"http://127.0.0.1:{port}"


def main() -> int:
    server, thread, endpoint = start_server()
    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    if OUT_PATH.exists():
        OUT_PATH.unlink()
    try:
        inner = HttpGenClient(endpoint, timeout=30.0)
        client = RecordingClient(inner, OUT_PATH)
        client.paraphrase([SAMPLE], lex=40, order=40)
        client.translate([SAMPLE], "en", "fr")
        client.translate([SECOND], "fr", "en")
        client.fill_mask(f"The {MASK_TOKEN} sat on the {MASK_TOKEN}.", "word", ["cat", "mat"])
        client.fill_mask(f"{MASK_TOKEN} {SECOND}", "sentence", ["An earlier sentence was here."])
        client.perplexity([SAMPLE, SECOND])
        client.similarity(SAMPLE, SAMPLE)
        client.similarity(SAMPLE, SECOND)
        client.judge([f"Sentence number {i} mentions topic {i}." for i in range(13)])
        inner.close()
    finally:
        server.should_exit = True
        thread.join(timeout=5)
    count = sum(1 for _ in OUT_PATH.open())
    print(f"wrote {count} request/response pairs to {OUT_PATH}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
