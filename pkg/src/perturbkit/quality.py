"""Text-quality panel: readability, semantic similarity, perplexity, and an
LLM judge, reported per (original, perturbed) pair.

Readability is computed natively; the other three delegate to the generation
client. Missing client values stay None in the row, never silent zeros.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean

from .errors import ProtocolError
from .genclient import GenerationClient
from .textseg import count_syllables, tokenize

JUDGE_BATCH_SIZE = 13
JUDGE_PROMPT_ID = "writing-quality-v1"
JUDGE_PROMPT_TEMPLATE = (
    "You are given an array of {n} sentences. Please rate these sentences and "
    "reply with an array of scores assigned to these sentences. Each score is "
    "on a scale from 1 to 10, the higher the score, the sentence is written "
    "more like a human. Your reply example: {example}."
)


def build_judge_prompt(n: int = JUDGE_BATCH_SIZE) -> str:
    example = "[" + ",".join(["2"] * n) + "]"
    return JUDGE_PROMPT_TEMPLATE.format(n=n, example=example)


@dataclass(frozen=True)
class QualityRow:
    operator: str
    sim: float | None        # 0-100
    flesch: float | None
    gpt_judge: float | None  # 1-10
    ppl: float | None


def flesch_reading_ease(text: str) -> float:
    """206.835 - 1.015 * words/sentences - 84.6 * syllables/words.

    Words without any letter (e.g. bare numbers) count one syllable.
    """
    spans = tokenize(text)
    words = spans.words()
    if not words:
        raise ValueError("flesch_reading_ease requires at least one word")
    n_sentences = max(len(spans.sentence_spans), 1)
    n_syllables = 0
    for w in words:
        token = w.text(text)
        if any(c.isalpha() for c in token):
            n_syllables += count_syllables(token)
        else:
            n_syllables += 1
    n_words = len(words)
    return 206.835 - 1.015 * (n_words / n_sentences) - 84.6 * (n_syllables / n_words)


def similarity(original: str, perturbed: str, client: GenerationClient) -> float:
    """Semantic similarity on the 0-100 scale; similarity(x, x) == 100."""
    return 100.0 * client.similarity(original, perturbed)


def perplexity(text: str, client: GenerationClient) -> float:
    if not text or text.isspace():
        raise ValueError("perplexity requires non-empty text")
    value = client.perplexity([text])[0]
    if value <= 0:
        raise ProtocolError(f"perplexity must be positive, got {value}")
    return value


def judge(texts: list[str], client: GenerationClient) -> list[int]:
    """Score a batch of exactly 13 texts with the shipped judge prompt.

    A malformed reply is retried once, then surfaced as a ProtocolError.
    """
    if len(texts) != JUDGE_BATCH_SIZE:
        raise ValueError(f"judge expects a batch of {JUDGE_BATCH_SIZE} texts, got {len(texts)}")
    return _judge_once_with_retry(texts, client)


def _judge_once_with_retry(texts: list[str], client: GenerationClient) -> list[int]:
    try:
        return client.judge(texts, prompt_id=JUDGE_PROMPT_ID)
    except ProtocolError:
        return client.judge(texts, prompt_id=JUDGE_PROMPT_ID)


def judge_many(texts: list[str], client: GenerationClient) -> list[int]:
    """Chunk into batches of 13; the final partial batch reuses the prompt
    template with its size parameter adjusted."""
    out: list[int] = []
    for i in range(0, len(texts), JUDGE_BATCH_SIZE):
        out.extend(_judge_once_with_retry(texts[i:i + JUDGE_BATCH_SIZE], client))
    return out


def quality_row(
    operator: str,
    pairs: list[tuple[str, str]],
    client: GenerationClient | None,
    with_judge: bool = True,
    with_ppl: bool = True,
) -> QualityRow:
    """Mean quality metrics for one operator over (original, perturbed) pairs."""
    if not pairs:
        raise ValueError("quality_row requires at least one pair")
    flesch = fmean(flesch_reading_ease(p) for _, p in pairs)
    sim = gpt = ppl = None
    if client is not None:
        sim = fmean(similarity(o, p, client) for o, p in pairs)
        perturbed_texts = [p for _, p in pairs]
        if with_judge:
            gpt = fmean(judge_many(perturbed_texts, client))
        if with_ppl:
            ppl = fmean(client.perplexity(perturbed_texts))
    return QualityRow(operator=operator, sim=sim, flesch=flesch, gpt_judge=gpt, ppl=ppl)
