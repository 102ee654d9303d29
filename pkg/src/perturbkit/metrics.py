"""Threshold calibration and detection/robustness metrics.

The decision rule is ``score >= threshold -> AI``. Calibration maximizes
Youden's J over candidate thresholds (midpoints between adjacent distinct
scores, plus 0 and 1), breaking ties toward the smallest threshold. The fixed
threshold then feeds F1/Acc_G/Acc_H and the attack success rate, all on the
0-100 scale.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

from .dataset import AI, HUMAN
from .errors import SingleClassError


@dataclass(frozen=True)
class LabeledScore:
    doc_id: str
    score: float
    label: str

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must be in [0, 1], got {self.score}")
        if self.label not in (HUMAN, AI):
            raise ValueError(f"label must be human or ai, got {self.label!r}")


@dataclass(frozen=True)
class CalibrationResult:
    threshold: float
    j_statistic: float
    tpr: float
    fpr: float


@dataclass(frozen=True)
class EvaluationReport:
    f1: float
    acc_g: float
    acc_h: float
    threshold: float
    tp: int
    fp: int
    tn: int
    fn: int
    doc_ids: frozenset[str]

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class AttackReport:
    operator: str
    asr: float
    acc_g_original: float
    acc_g_perturbed: float
    n_samples: int


def candidate_thresholds(scores: list[float]) -> list[float]:
    """Midpoints between adjacent distinct scores, plus the endpoints 0 and 1."""
    distinct = sorted(set(scores))
    candidates = {0.0, 1.0}
    for lo, hi in zip(distinct, distinct[1:]):
        candidates.add((lo + hi) / 2.0)
    return sorted(candidates)


def _split_scores(scores: list[LabeledScore]) -> tuple[list[float], list[float]]:
    ai = sorted(s.score for s in scores if s.label == AI)
    human = sorted(s.score for s in scores if s.label == HUMAN)
    return ai, human


def _rates_at(ai_sorted: list[float], human_sorted: list[float], threshold: float) -> tuple[float, float]:
    tpr = (len(ai_sorted) - bisect_left(ai_sorted, threshold)) / len(ai_sorted)
    fpr = (len(human_sorted) - bisect_left(human_sorted, threshold)) / len(human_sorted)
    return tpr, fpr


def calibrate_threshold(reserve: list[LabeledScore]) -> CalibrationResult:
    """Pick the threshold maximizing J = TPR - FPR on the reserve scores."""
    ai, human = _split_scores(reserve)
    if not ai or not human:
        raise SingleClassError("calibration requires both human and ai scores")
    best: CalibrationResult | None = None
    for t in candidate_thresholds([s.score for s in reserve]):
        tpr, fpr = _rates_at(ai, human, t)
        j = tpr - fpr
        if best is None or j > best.j_statistic + 1e-12:
            best = CalibrationResult(threshold=t, j_statistic=j, tpr=tpr, fpr=fpr)
    assert best is not None
    return best


def evaluate(scores: list[LabeledScore], threshold: float) -> EvaluationReport:
    """Confusion counts and 0-100 metrics at a fixed threshold (AI positive).

    Metrics whose denominator is zero (e.g. Acc_H on an AI-only set) are
    reported as 0.0.
    """
    if not scores:
        raise ValueError("evaluate requires at least one score")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    tp = fp = tn = fn = 0
    for s in scores:
        flagged = s.score >= threshold
        if s.label == AI:
            tp += flagged
            fn += not flagged
        else:
            fp += flagged
            tn += not flagged
    f1 = 200.0 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) > 0 else 0.0
    acc_g = 100.0 * tp / (tp + fn) if (tp + fn) > 0 else 0.0
    acc_h = 100.0 * tn / (tn + fp) if (tn + fp) > 0 else 0.0
    return EvaluationReport(
        f1=f1,
        acc_g=acc_g,
        acc_h=acc_h,
        threshold=threshold,
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
        doc_ids=frozenset(s.doc_id for s in scores),
    )


def attack_success_rate(original: EvaluationReport, perturbed: EvaluationReport, operator: str = "") -> AttackReport:
    """ASR = Acc_G before minus Acc_G after, at the same fixed threshold.

    Negative values (perturbations that increase detectability) are reported
    as-is.
    """
    if original.threshold != perturbed.threshold:
        raise ValueError(
            f"threshold mismatch: original {original.threshold} vs perturbed {perturbed.threshold}"
        )
    if original.doc_ids != perturbed.doc_ids:
        raise ValueError("original and perturbed reports cover different doc_id sets")
    return AttackReport(
        operator=operator,
        asr=original.acc_g - perturbed.acc_g,
        acc_g_original=original.acc_g,
        acc_g_perturbed=perturbed.acc_g,
        n_samples=original.n,
    )


def flip_rate(original: list[LabeledScore], perturbed: list[LabeledScore], threshold: float) -> float:
    """Diagnostic only (not the ASR definition): among AI docs flagged before
    perturbation, the fraction no longer flagged after."""
    perturbed_by_id = {s.doc_id: s for s in perturbed}
    if set(perturbed_by_id) != {s.doc_id for s in original}:
        raise ValueError("original and perturbed scores cover different doc_id sets")
    detected = [s for s in original if s.label == AI and s.score >= threshold]
    if not detected:
        return 0.0
    flipped = sum(1 for s in detected if perturbed_by_id[s.doc_id].score < threshold)
    return flipped / len(detected)


def roc_curve(scores: list[LabeledScore]) -> list[tuple[float, float, float]]:
    """(fpr, tpr, threshold) at every candidate threshold, fpr nondecreasing."""
    ai, human = _split_scores(scores)
    if not ai or not human:
        raise SingleClassError("roc_curve requires both human and ai scores")
    points = []
    for t in sorted(candidate_thresholds([s.score for s in scores]), reverse=True):
        tpr, fpr = _rates_at(ai, human, t)
        points.append((fpr, tpr, t))
    return points


def auc_from_roc(points: list[tuple[float, float, float]]) -> float:
    """Trapezoidal area under an fpr-ordered ROC curve."""
    area = 0.0
    for (fpr0, tpr0, _), (fpr1, tpr1, _) in zip(points, points[1:]):
        area += (fpr1 - fpr0) * (tpr0 + tpr1) / 2.0
    return area
