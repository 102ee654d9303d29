"""Adversarial-augmentation datasets: seeded splits, per-operator budgets,
and hold-one-out transfer splits.

Perturbed records keep the "ai" label (the point of augmentation is teaching
a detector that perturbed AI text is still AI) and are added to, not swapped
for, the original training records.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field, replace

from .dataset import AI, Document
from .genclient import GenerationClient
from .perturb import OPERATORS, PerturbationFailure, PerturbationSpec, apply_batch


@dataclass(frozen=True)
class AugmentationPlan:
    operators: tuple[str, ...]
    budget_per_operator: int
    seed: int
    source_split: str = "train"
    target_holdout: str | None = None

    def __post_init__(self) -> None:
        unknown = set(self.operators) - set(OPERATORS)
        if unknown:
            raise ValueError(f"unknown operators {sorted(unknown)}")
        if len(set(self.operators)) != len(self.operators):
            raise ValueError("operators must be unique")
        if self.budget_per_operator < 0:
            raise ValueError("budget_per_operator must be >= 0")
        if self.source_split != "train":
            raise ValueError("augmentation may only draw from the train split")
        if self.target_holdout is not None:
            if self.target_holdout not in OPERATORS:
                raise ValueError(f"unknown holdout target {self.target_holdout!r}")
            if self.target_holdout in self.operators:
                raise ValueError(f"holdout target {self.target_holdout!r} must not be trained on")


@dataclass
class AugmentedDataset:
    records: list[Document]
    manifest: dict = field(default_factory=dict)


def split_dataset(
    docs: list[Document],
    fractions: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 42,
) -> dict[str, str]:
    """Deterministic seeded shuffle with proportional train/reserve/test cuts.

    Returns doc_id -> split; independent of the input order (ids are sorted
    before shuffling), so the assignment is stable across runs and platforms.
    """
    if not docs:
        raise ValueError("split_dataset requires at least one document")
    if len(fractions) != 3 or any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"fractions must be three non-negative values summing to 1, got {fractions}")
    ids = sorted(d.id for d in docs)
    random.Random(seed).shuffle(ids)
    n = len(ids)
    n_train = int(n * fractions[0])
    n_reserve = int(n * (fractions[0] + fractions[1])) - n_train
    assignment: dict[str, str] = {}
    for i, doc_id in enumerate(ids):
        if i < n_train:
            assignment[doc_id] = "train"
        elif i < n_train + n_reserve:
            assignment[doc_id] = "reserve"
        else:
            assignment[doc_id] = "test"
    return assignment


def assign_splits(docs: list[Document], fractions=(0.8, 0.1, 0.1), seed: int = 42) -> list[Document]:
    assignment = split_dataset(docs, fractions, seed)
    return [d.with_split(assignment[d.id]) for d in docs]


def transfer_split(plan: AugmentationPlan) -> tuple[tuple[str, ...], str]:
    """(in-domain operators, held-out target): all operators minus the target."""
    target = plan.target_holdout
    if target is None:
        raise ValueError("plan has no target_holdout")
    if target not in OPERATORS:
        raise ValueError(f"unknown holdout target {target!r}")
    return tuple(op for op in OPERATORS if op != target), target


def _operator_rng(seed: int, operator: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{operator}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def build_augmented(
    train: list[Document],
    plan: AugmentationPlan,
    client: GenerationClient | None = None,
    operator_params: dict[str, dict] | None = None,
    forbidden_ids: frozenset[str] = frozenset(),
    max_workers: int = 1,
) -> AugmentedDataset:
    """Original train records plus exactly budget perturbed records per operator.

    Per operator, budget AI train docs are sampled without replacement
    (independently across operators) and perturbed; provenance fields
    operator/source_id/seed ride along in the JSONL records. Any overlap
    between source ids and ``forbidden_ids`` (reserve/test) aborts the build.
    """
    bad_split = [d.id for d in train if d.split not in (None, "train")]
    if bad_split:
        raise ValueError(f"non-train documents passed to build_augmented: {bad_split[:3]}")
    pool = sorted((d for d in train if d.label == AI), key=lambda d: d.id)
    if plan.budget_per_operator > len(pool):
        raise ValueError(
            f"budget {plan.budget_per_operator} exceeds the {len(pool)} available AI training samples "
            f"(short by {plan.budget_per_operator - len(pool)})"
        )
    leaked = {d.id for d in pool} & set(forbidden_ids)
    if leaked:
        raise ValueError(f"train pool leaks reserve/test ids: {sorted(leaked)[:3]}")

    operator_params = operator_params or {}
    records: list[Document] = list(train)
    counts: dict[str, int] = {}
    failures: list[PerturbationFailure] = []
    for operator in (op for op in OPERATORS if op in plan.operators):
        rng = _operator_rng(plan.seed, operator)
        chosen = sorted(rng.sample(pool, plan.budget_per_operator), key=lambda d: d.id)
        spec = PerturbationSpec(operator=operator, params=operator_params.get(operator, {}), seed=plan.seed)
        results = apply_batch(chosen, spec, client=client, max_workers=max_workers)
        n_ok = 0
        for src, result in zip(chosen, results):
            if isinstance(result, PerturbationFailure):
                failures.append(result)
                continue
            records.append(
                Document(
                    id=f"{operator}--{src.id}",
                    text=result.perturbed_text,
                    label=AI,
                    domain=src.domain,
                    split="train",
                    extras={"operator": operator, "source_id": src.id, "seed": plan.seed},
                )
            )
            n_ok += 1
        counts[operator] = n_ok
        if n_ok != plan.budget_per_operator:
            raise ValueError(
                f"operator {operator}: {n_ok} perturbed records for budget {plan.budget_per_operator} "
                f"({len(results) - n_ok} failures)"
            )

    manifest = {
        "plan": {
            "operators": list(plan.operators),
            "budget_per_operator": plan.budget_per_operator,
            "seed": plan.seed,
            "source_split": plan.source_split,
            "target_holdout": plan.target_holdout,
        },
        "counts": counts,
        "total_perturbed": sum(counts.values()),
        "originals": len(train),
        "policy": "perturbed records are added to the originals (union), label kept 'ai'",
        "leakage_checked": True,
    }
    return AugmentedDataset(records=records, manifest=manifest)
