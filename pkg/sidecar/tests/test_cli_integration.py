"""The primary CLI driving a live fake sidecar over HTTP: neural operators
flow through the wire protocol end to end."""

from __future__ import annotations

import json
import random

import pytest
import yaml

from perturbkit.cli import main
from perturbkit.dataset import Document, write_documents

from test_contract import start_server


@pytest.fixture(scope="module")
def sidecar():
    server, thread, app, endpoint = start_server()
    yield endpoint
    server.should_exit = True
    thread.join(timeout=5)


def _make_dataset(path, n=6):
    rng = random.Random(5)
    vocab = ["model", "signal", "result", "method", "sample", "value", "field", "case"]
    docs = []
    for i in range(n):
        words = [rng.choice(vocab) for _ in range(30)]
        text = " ".join(words).capitalize() + ". " + "Another sentence follows here."
        docs.append(Document(id=f"ai-{i}", text=text, label="ai", split="test"))
    write_documents(path, docs)


def test_perturb_neural_operators_via_live_sidecar(tmp_path, sidecar):
    dataset = tmp_path / "data.jsonl"
    _make_dataset(dataset)
    config = tmp_path / "config.yaml"
    config.write_text(yaml.safe_dump({
        "dataset": str(dataset),
        "output_dir": str(tmp_path / "out"),
        "seed": 7,
        "sidecar": {"endpoint": sidecar, "timeout": 30.0},
    }), encoding="utf-8")
    assert main(["--config", str(config), "perturb",
                 "--operators", "paraphrase,doc_backtrans,sent_mlm,word_mlm"]) == 0
    for operator in ("paraphrase", "doc_backtrans", "sent_mlm", "word_mlm"):
        lines = (tmp_path / "out" / "perturbed" / f"{operator}.jsonl").read_text().splitlines()
        records = [json.loads(l) for l in lines]
        assert len(records) == 6
        assert all("error" not in r for r in records), operator


def test_cli_probe_detects_dead_sidecar(tmp_path):
    dataset = tmp_path / "data.jsonl"
    _make_dataset(dataset)
    config = tmp_path / "config.yaml"
    config.write_text(yaml.safe_dump({
        "dataset": str(dataset),
        "output_dir": str(tmp_path / "out"),
        "sidecar": {"endpoint": "http://127.0.0.1:9", "timeout": 2.0},
    }), encoding="utf-8")
    assert main(["--config", str(config), "perturb", "--operators", "paraphrase"]) == 3
