"""Real-model backends (lazy, optional).

Loading happens at startup; any failure aborts the process, except the judge
which degrades to "unavailable" when no API key is configured. Each backend
has the same call signature as its fake counterpart. Heavy models are
serialized behind per-kind locks by the service layer since the runtimes are
not uniformly thread-safe.
"""

from __future__ import annotations

import math
import os
import re

from perturbkit.quality import build_judge_prompt

MASK_TOKEN = "<|mask|>"


class ModelLoadError(RuntimeError):
    pass


def load_backends(registry) -> dict:
    try:
        import torch
        from transformers import (
            AutoModelForCausalLM,
            AutoModelForSeq2SeqLM,
            AutoTokenizer,
            pipeline,
        )
    except ImportError as exc:
        raise ModelLoadError(f"real mode needs the [models] extra installed: {exc}") from exc

    device = registry.entries["paraphrase"].device

    def seq2seq(model_id):
        tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = AutoModelForSeq2SeqLM.from_pretrained(model_id).to(device)
        return tokenizer, model

    try:
        para_tok, para_model = seq2seq(registry.entries["paraphrase"].model_id)
        fr_tok, fr_model = seq2seq(os.environ.get("SIDECAR_TRANSLATE_EN_FR", "Helsinki-NLP/opus-mt-en-fr"))
        en_tok, en_model = seq2seq(os.environ.get("SIDECAR_TRANSLATE_FR_EN", "Helsinki-NLP/opus-mt-fr-en"))
        word_filler = pipeline("fill-mask", model=registry.entries["fill_mask"].model_id, device=-1)
        sent_tok, sent_model = seq2seq(os.environ.get("SIDECAR_FILL_MASK_SENTENCE", "facebook/bart-large"))
        ppl_tok = AutoTokenizer.from_pretrained(registry.entries["perplexity"].model_id)
        ppl_model = AutoModelForCausalLM.from_pretrained(registry.entries["perplexity"].model_id).to(device)
        from sentence_transformers import SentenceTransformer
        embedder = SentenceTransformer(registry.entries["similarity"].model_id, device=device)
    except Exception as exc:
        raise ModelLoadError(f"model load failed: {exc}") from exc

    def generate(tokenizer, model, prompt: str, **decode) -> str:
        inputs = tokenizer(prompt, return_tensors="pt", truncation=True).to(device)
        with torch.no_grad():
            output = model.generate(**inputs, **decode)
        return tokenizer.decode(output[0], skip_special_tokens=True)

    def paraphrase(text: str, lex: int, order: int) -> str:
        # DIPPER-style control codes: higher codes mean less diversity
        prompt = f"lexical = {100 - lex}, order = {100 - order} <sent> {text} </sent>"
        return generate(para_tok, para_model, prompt, max_new_tokens=512)

    def translate(text: str, source_lang: str, target_lang: str) -> str:
        if (source_lang, target_lang) == ("en", "fr"):
            tok, model = fr_tok, fr_model
        elif (source_lang, target_lang) == ("fr", "en"):
            tok, model = en_tok, en_model
        else:
            raise ValueError(f"unsupported language pair {source_lang}->{target_lang}")
        return generate(tok, model, text, num_beams=4, max_new_tokens=512)

    def fill_mask(text: str, granularity: str) -> list[str]:
        n_masks = text.count(MASK_TOKEN)
        if granularity == "word":
            fills = []
            working = text
            for _ in range(n_masks):
                candidate = working.replace(MASK_TOKEN, word_filler.tokenizer.mask_token, 1)
                # strip any remaining placeholders so the model sees one mask
                candidate = candidate.replace(MASK_TOKEN, "")
                best = word_filler(candidate, top_k=1)[0]
                fills.append(best["token_str"].strip())
                working = working.replace(MASK_TOKEN, best["token_str"].strip(), 1)
            return fills
        fills = []
        working = text
        for _ in range(n_masks):
            prompt = working.replace(MASK_TOKEN, sent_tok.mask_token or "<mask>", 1).replace(MASK_TOKEN, "")
            completed = generate(sent_tok, sent_model, prompt, max_new_tokens=128)
            fills.append(_extract_new_sentence(completed) or completed[:200])
            working = working.replace(MASK_TOKEN, fills[-1], 1)
        return fills

    def perplexity(text: str) -> float:
        inputs = ppl_tok(text, return_tensors="pt", truncation=True).to(device)
        with torch.no_grad():
            loss = ppl_model(**inputs, labels=inputs["input_ids"]).loss
        return float(math.exp(loss.item()))

    def similarity(text_a: str, text_b: str) -> float:
        vecs = embedder.encode([text_a, text_b], normalize_embeddings=True)
        cosine = float((vecs[0] * vecs[1]).sum())
        return min(max((cosine + 1.0) / 2.0 if cosine < 0 else cosine, 0.0), 1.0)

    def judge(texts: list[str]) -> list[int]:
        raise RuntimeError("judge backend requires JUDGE_API_KEY; endpoint marked unavailable")

    backends = {
        "paraphrase": paraphrase,
        "translate": translate,
        "fill_mask": fill_mask,
        "perplexity": perplexity,
        "similarity": similarity,
        "judge": judge,
    }
    if os.environ.get("JUDGE_API_KEY"):
        backends["judge"] = _api_judge(registry.entries["judge"].model_id)
    else:
        registry.entries["judge"].ready = False
    return backends


def _extract_new_sentence(completed: str) -> str | None:
    match = re.search(r"[^.?!]+[.?!]", completed)
    return match.group(0).strip() if match else None


def _api_judge(model_id: str):
    import httpx

    endpoint = os.environ.get("JUDGE_API_BASE", "https://api.openai.com/v1") + "/chat/completions"
    key = os.environ["JUDGE_API_KEY"]

    def judge(texts: list[str]) -> list[int]:
        prompt = build_judge_prompt(len(texts))
        content = prompt + "\n\n" + "\n".join(f"{i + 1}. {t}" for i, t in enumerate(texts))
        resp = httpx.post(
            endpoint,
            headers={"Authorization": f"Bearer {key}"},
            json={"model": model_id, "messages": [{"role": "user", "content": content}], "temperature": 0},
            timeout=60.0,
        )
        resp.raise_for_status()
        reply = resp.json()["choices"][0]["message"]["content"]
        match = re.search(r"\[([0-9,\s]+)\]", reply)
        if not match:
            raise ValueError(f"judge reply has no score array: {reply[:100]}")
        scores = [int(v) for v in match.group(1).split(",")]
        return scores

    return judge
