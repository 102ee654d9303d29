"""Optional hardware-gated smoke test with real models.

Enable with SIDECAR_REAL_MODELS=1 (downloads translation and MLM models;
needs network and several GB of disk).
"""

from __future__ import annotations

import os

import pytest

pytestmark = pytest.mark.skipif(
    os.environ.get("SIDECAR_REAL_MODELS") != "1",
    reason="real-model smoke test is hardware-gated (set SIDECAR_REAL_MODELS=1)",
)

ORIGIN = (
    "In this paper, we explore grand unified theories that utilize an "
    "SU(5)xSU(5) gauge group. Our focus is on preventing fast proton decay "
    "through a combination of small triplet couplings and a large triplet "
    "mass, achieved through discrete symmetries."
)


def _unigram_overlap(a: str, b: str) -> float:
    wa = {w.lower().strip(".,;:!?") for w in a.split()}
    wb = {w.lower().strip(".,;:!?") for w in b.split()}
    return len(wa & wb) / len(wa)


def test_backtranslation_overlap_and_not_identity():
    from perturbkit_sidecar.registry import build_registry

    registry = build_registry(fake_mode=False)
    translate = registry.backends["translate"]
    pivoted = translate(ORIGIN, "en", "fr")
    restored = translate(pivoted, "fr", "en")
    assert restored != ORIGIN
    assert _unigram_overlap(ORIGIN, restored) >= 0.5


def test_word_mlm_changes_at_most_twenty_percent():
    from perturbkit.dataset import Document
    from perturbkit.genclient import GenerationClient, GenRequest, GenResponse
    from perturbkit.perturb import mlm_words
    from perturbkit.textseg import tokenize
    from perturbkit_sidecar.registry import build_registry

    registry = build_registry(fake_mode=False)

    class LocalClient(GenerationClient):
        def request(self, req: GenRequest) -> GenResponse:
            assert req.kind == "fill_mask"
            fills = registry.backends["fill_mask"](req.payload["text"], req.payload["granularity"])
            return GenResponse(req.request_id, fills, registry.model_tag("fill_mask"))

    doc = Document(id="origin", text=ORIGIN, label="ai")
    result = mlm_words(doc, max_ratio=0.20, client=LocalClient(), seed=1)
    n_words = len(tokenize(ORIGIN).words())
    assert result.applied_count <= int(0.20 * n_words)
