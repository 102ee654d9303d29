"""Operator-facing command surface for reproducible runs.

Commands: split, perturb, calibrate, evaluate, attack, quality, augment.
All behavior is driven by a YAML config file; flags override config fields
one-to-one. Every output file gets a manifest (config hash, seeds, version),
and reruns with an equal manifest are byte-identical except timestamps.

Exit codes: 0 ok, 1 unexpected error, 2 unreadable dataset, 3 sidecar
unreachable for neural operators, 4 single-class reserve, 5 missing
prerequisite run artifacts.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field, asdict
from datetime import datetime, timezone
from pathlib import Path

import httpx
import yaml

from . import __version__
from .augment import AugmentationPlan, assign_splits, build_augmented, transfer_split
from .dataset import AI, Document, read_documents, write_documents
from .detectors import CorpusIndex, DetectorFailure, DetectorScore, build_index, external_detect, retrieval_score
from .errors import PerturbkitError, SingleClassError, TransportError
from .genclient import GenerationClient, HttpGenClient, stub_client
from .metrics import LabeledScore, attack_success_rate, calibrate_threshold, evaluate, flip_rate
from .perturb import NEURAL_OPERATORS, OPERATORS, PerturbationFailure, PerturbationSpec, apply_batch
from .quality import quality_row

log = logging.getLogger("perturbkit")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DATASET = 2
EXIT_SIDECAR = 3
EXIT_SINGLE_CLASS = 4
EXIT_MISSING_RUNS = 5

CSV_COLUMNS = ["detector", "operator", "f1", "acc_g", "acc_h", "threshold", "asr", "n"]


class CliError(Exception):
    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code


@dataclass
class RunConfig:
    """Declarative run description; see README for the full schema."""

    dataset: str = ""
    output_dir: str = "out"
    seed: int = 42
    workers: int = 1
    split_fractions: tuple[float, float, float] = (0.8, 0.1, 0.1)
    reserve_size: int = 5000
    sidecar: dict = field(default_factory=dict)
    detectors: dict = field(default_factory=dict)
    operators: dict = field(default_factory=dict)
    attack_split: str = "test"
    quality_sample: int = 13
    flip_rate_column: bool = False

    def config_hash(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True, default=list)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def load_config(path: str | None, overrides: argparse.Namespace) -> RunConfig:
    raw: dict = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}
    cfg = RunConfig()
    for key, value in raw.items():
        if not hasattr(cfg, key):
            raise CliError(EXIT_ERROR, f"unknown config field {key!r}")
        setattr(cfg, key, value)
    cfg.split_fractions = tuple(cfg.split_fractions)
    for flag in ("dataset", "output_dir", "seed", "workers"):
        value = getattr(overrides, flag, None)
        if value is not None:
            setattr(cfg, flag, value)
    if getattr(overrides, "sidecar_endpoint", None):
        cfg.sidecar = {"endpoint": overrides.sidecar_endpoint}
    if getattr(overrides, "sidecar_stub", None):
        cfg.sidecar = {"stub": overrides.sidecar_stub}
    if not cfg.dataset:
        raise CliError(EXIT_ERROR, "no dataset configured (config 'dataset' or --dataset)")
    return cfg


# ---------------------------------------------------------------- io helpers

def atomic_write(path: Path, data: str) -> None:
    """Write-then-rename so partial failures never leave a truncated report."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp-{os.getpid()}")
    tmp.write_text(data, encoding="utf-8")
    os.replace(tmp, path)


def write_manifest(path: Path, command: str, cfg: RunConfig, inputs: dict, outputs: list[str], extra: dict | None = None) -> None:
    manifest = {
        "command": command,
        "version": __version__,
        "config_hash": cfg.config_hash(),
        "seed": cfg.seed,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "inputs": inputs,
        "outputs": outputs,
    }
    if extra:
        manifest.update(extra)
    atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def load_dataset(cfg: RunConfig) -> list[Document]:
    try:
        return read_documents(cfg.dataset)
    except (OSError, ValueError) as exc:
        raise CliError(EXIT_DATASET, f"cannot read dataset {cfg.dataset}: {exc}") from exc


def render_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row.get(k, "") for k in columns})
    return buf.getvalue()


def fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.2f}"


# ------------------------------------------------------------ client/detector

def build_gen_client(cfg: RunConfig, needed: bool) -> GenerationClient | None:
    sc = cfg.sidecar or {}
    if "stub" in sc:
        return stub_client(sc["stub"], path=sc.get("capture"))
    if "endpoint" in sc:
        client = HttpGenClient(
            sc["endpoint"],
            timeout=float(sc.get("timeout", 120.0)),
            retries=int(sc.get("retries", 2)),
            max_in_flight=int(sc.get("max_in_flight", 4)),
        )
        if needed:
            _probe_sidecar(sc["endpoint"], float(sc.get("timeout", 120.0)))
        return client
    if needed:
        raise CliError(EXIT_SIDECAR, "neural operators requested but no sidecar configured")
    return None


def _probe_sidecar(endpoint: str, timeout: float) -> None:
    try:
        resp = httpx.get(endpoint.rstrip("/") + "/health", timeout=min(timeout, 10.0))
    except httpx.HTTPError as exc:
        raise CliError(EXIT_SIDECAR, f"sidecar unreachable at {endpoint}: {exc}") from exc
    if resp.status_code != 200:
        raise CliError(EXIT_SIDECAR, f"sidecar health probe returned {resp.status_code}")


def _hash_score(text: str, tag: str) -> float:
    digest = hashlib.sha256(f"{tag}:{text}".encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big") / 0xFFFFFFFF


class DetectorRunner:
    """Scores texts under one configured detector tag."""

    def __init__(self, tag: str, spec: dict, docs: list[Document]):
        self.tag = tag
        self.kind = spec.get("kind", "bm25")
        self.spec = spec
        self._index: CorpusIndex | None = None
        if self.kind == "bm25":
            splits = spec.get("splits", ["train"])
            corpus = [d.text for d in docs if d.split in splits and d.label == AI]
            extra_path = spec.get("extra_corpus")
            if extra_path:
                corpus.extend(d.text for d in read_documents(extra_path))
            source_tag = spec.get("source_tag", "+".join(splits))
            self._index = build_index(corpus, source_tag=source_tag, k1=spec.get("k1", 1.2), b=spec.get("b", 0.75))
        elif self.kind not in ("external", "hash-stub"):
            raise CliError(EXIT_ERROR, f"detector {tag!r}: unknown kind {self.kind!r}")

    def score(self, texts: list[str], doc_ids: list[str]) -> list[DetectorScore | DetectorFailure]:
        if self.kind == "bm25":
            out: list[DetectorScore | DetectorFailure] = []
            for text, doc_id in zip(texts, doc_ids):
                try:
                    s = retrieval_score(self._index, text, doc_id=doc_id)
                    out.append(DetectorScore(doc_id=doc_id, score=s.score, detector_tag=self.tag))
                except ValueError as exc:
                    out.append(DetectorFailure(doc_id=doc_id, detector_tag=self.tag, error=str(exc)))
            return out
        if self.kind == "hash-stub":
            return [DetectorScore(doc_id=i, score=_hash_score(t, self.tag), detector_tag=self.tag) for t, i in zip(texts, doc_ids)]
        return external_detect(self.spec["endpoint"], texts, doc_ids=doc_ids, detector_tag=self.tag)


def build_detector(cfg: RunConfig, tag: str, docs: list[Document]) -> DetectorRunner:
    if tag not in cfg.detectors:
        raise CliError(EXIT_ERROR, f"detector {tag!r} not configured (have {sorted(cfg.detectors)})")
    return DetectorRunner(tag, cfg.detectors[tag], docs)


def labeled_scores(runner: DetectorRunner, docs: list[Document]) -> list[LabeledScore]:
    results = runner.score([d.text for d in docs], [d.id for d in docs])
    labels = {d.id: d.label for d in docs}
    scores: list[LabeledScore] = []
    for r in results:
        if isinstance(r, DetectorFailure):
            log.warning("detector %s failed on %s: %s", r.detector_tag, r.doc_id, r.error)
            continue
        scores.append(LabeledScore(doc_id=r.doc_id, score=r.score, label=labels[r.doc_id]))
    return scores


# ------------------------------------------------------------------- commands

def _parse_operators(value: str | None) -> list[str]:
    if not value or value == "all":
        return list(OPERATORS)
    ops = [v.strip() for v in value.split(",") if v.strip()]
    unknown = set(ops) - set(OPERATORS)
    if unknown:
        raise CliError(EXIT_ERROR, f"unknown operators {sorted(unknown)}")
    return ops


def _attack_docs(cfg: RunConfig, docs: list[Document]) -> list[Document]:
    selected = [d for d in docs if d.split == cfg.attack_split and d.label == AI]
    return sorted(selected, key=lambda d: d.id)


def cmd_split(cfg: RunConfig, args: argparse.Namespace) -> int:
    docs = load_dataset(cfg)
    out_dir = Path(cfg.output_dir)
    assigned = assign_splits(docs, cfg.split_fractions, cfg.seed)
    out_path = out_dir / "dataset_split.jsonl"
    out_dir.mkdir(parents=True, exist_ok=True)
    write_documents(out_path, assigned)
    counts = {s: sum(1 for d in assigned if d.split == s) for s in ("train", "reserve", "test")}
    write_manifest(out_dir / "split_manifest.json", "split", cfg, {"dataset": cfg.dataset}, [str(out_path)], {"counts": counts})
    log.info("split %d docs into %s", len(assigned), counts)
    return EXIT_OK


def _perturbed_path(cfg: RunConfig, operator: str) -> Path:
    return Path(cfg.output_dir) / "perturbed" / f"{operator}.jsonl"


def cmd_perturb(cfg: RunConfig, args: argparse.Namespace) -> int:
    docs = load_dataset(cfg)
    targets = _attack_docs(cfg, docs)
    if not targets:
        raise CliError(EXIT_DATASET, f"no ai-labeled documents in split {cfg.attack_split!r}")
    operators = _parse_operators(args.operators)
    client = build_gen_client(cfg, needed=any(op in NEURAL_OPERATORS for op in operators))
    out_files = []
    counts: dict[str, dict] = {}
    for operator in operators:
        spec = PerturbationSpec(operator=operator, params=cfg.operators.get(operator, {}), seed=cfg.seed)
        results = apply_batch(targets, spec, client=client, max_workers=cfg.workers)
        lines = []
        n_ok = n_err = 0
        for r in results:
            if isinstance(r, PerturbationFailure):
                n_err += 1
                log.error("perturb %s failed on %s: %s", operator, r.original_id, r.error)
                lines.append(json.dumps(
                    {"id": r.original_id, "operator": operator, "seed": r.seed, "error": r.error},
                    ensure_ascii=False))
                continue
            n_ok += 1
            lines.append(json.dumps(
                {"id": r.original_id, "operator": operator, "seed": r.seed, "text": r.perturbed_text,
                 "applied_count": r.applied_count, "notes": r.notes},
                ensure_ascii=False))
        path = _perturbed_path(cfg, operator)
        atomic_write(path, "\n".join(lines) + "\n")
        out_files.append(str(path))
        counts[operator] = {"ok": n_ok, "errors": n_err}
        log.info("perturb %s: %d ok, %d errors", operator, n_ok, n_err)
    write_manifest(Path(cfg.output_dir) / "perturbed" / "manifest.json", "perturb", cfg,
                   {"dataset": cfg.dataset, "operators": operators}, out_files, {"counts": counts})
    return EXIT_OK


def _threshold_path(cfg: RunConfig, detector: str) -> Path:
    return Path(cfg.output_dir) / f"threshold_{detector}.json"


def cmd_calibrate(cfg: RunConfig, args: argparse.Namespace) -> int:
    docs = load_dataset(cfg)
    reserve = sorted((d for d in docs if d.split == "reserve"), key=lambda d: d.id)
    if not reserve:
        raise CliError(EXIT_DATASET, "dataset has no reserve split")
    if cfg.reserve_size and len(reserve) > cfg.reserve_size:
        import random as _random
        reserve = sorted(_random.Random(cfg.seed).sample(reserve, cfg.reserve_size), key=lambda d: d.id)
    runner = build_detector(cfg, args.detector, docs)
    scores = labeled_scores(runner, reserve)
    try:
        result = calibrate_threshold(scores)
    except SingleClassError as exc:
        raise CliError(EXIT_SINGLE_CLASS, str(exc)) from exc
    payload = {
        "detector": args.detector,
        "threshold": result.threshold,
        "j_statistic": result.j_statistic,
        "tpr": result.tpr,
        "fpr": result.fpr,
        "n_scores": len(scores),
        "seed": cfg.seed,
        "config_hash": cfg.config_hash(),
    }
    path = _threshold_path(cfg, args.detector)
    atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    write_manifest(Path(cfg.output_dir) / f"calibrate_{args.detector}_manifest.json", "calibrate", cfg,
                   {"dataset": cfg.dataset, "detector": args.detector}, [str(path)])
    log.info("calibrated %s: threshold=%.4f J=%.4f", args.detector, result.threshold, result.j_statistic)
    return EXIT_OK


def _load_threshold(cfg: RunConfig, detector: str) -> float:
    path = _threshold_path(cfg, detector)
    if not path.exists():
        raise CliError(EXIT_MISSING_RUNS, f"no calibrated threshold for {detector!r}; run calibrate first")
    return float(json.loads(path.read_text(encoding="utf-8"))["threshold"])


def cmd_evaluate(cfg: RunConfig, args: argparse.Namespace) -> int:
    docs = load_dataset(cfg)
    threshold = _load_threshold(cfg, args.detector)
    test = sorted((d for d in docs if d.split == "test"), key=lambda d: d.id)
    if not test:
        raise CliError(EXIT_DATASET, "dataset has no test split")
    runner = build_detector(cfg, args.detector, docs)
    report = evaluate(labeled_scores(runner, test), threshold)
    row = {
        "detector": args.detector, "operator": "origin", "f1": fmt(report.f1),
        "acc_g": fmt(report.acc_g), "acc_h": fmt(report.acc_h),
        "threshold": f"{threshold:.4f}", "asr": "", "n": report.n,
    }
    json_path = Path(cfg.output_dir) / f"evaluation_{args.detector}.json"
    csv_path = Path(cfg.output_dir) / f"evaluation_{args.detector}.csv"
    atomic_write(json_path, json.dumps({
        "detector": args.detector, "f1": report.f1, "acc_g": report.acc_g, "acc_h": report.acc_h,
        "threshold": threshold, "counts": {"tp": report.tp, "fp": report.fp, "tn": report.tn, "fn": report.fn},
    }, indent=2, sort_keys=True) + "\n")
    atomic_write(csv_path, render_csv([row], CSV_COLUMNS))
    write_manifest(Path(cfg.output_dir) / f"evaluation_{args.detector}_manifest.json", "evaluate", cfg,
                   {"dataset": cfg.dataset, "detector": args.detector}, [str(json_path), str(csv_path)])
    log.info("evaluate %s: F1=%.2f Acc_G=%.2f Acc_H=%.2f", args.detector, report.f1, report.acc_g, report.acc_h)
    return EXIT_OK


def _read_perturbed(cfg: RunConfig, operator: str) -> dict[str, str]:
    path = _perturbed_path(cfg, operator)
    if not path.exists():
        raise CliError(EXIT_MISSING_RUNS, f"missing perturbed run {path}; run perturb first")
    texts: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            if "error" in record:
                continue
            texts[record["id"]] = record["text"]
    return texts


def cmd_attack(cfg: RunConfig, args: argparse.Namespace) -> int:
    docs = load_dataset(cfg)
    threshold = _load_threshold(cfg, args.detector)
    operators = _parse_operators(args.operators)
    targets = _attack_docs(cfg, docs)
    if not targets:
        raise CliError(EXIT_DATASET, f"no ai-labeled documents in split {cfg.attack_split!r}")
    runner = build_detector(cfg, args.detector, docs)
    original_scores = labeled_scores(runner, targets)
    original_report = evaluate(original_scores, threshold)

    rows = []
    reports = []
    columns = list(CSV_COLUMNS)
    if cfg.flip_rate_column:
        columns.append("flip_rate_diagnostic")
    for operator in (op for op in OPERATORS if op in operators):
        perturbed_texts = _read_perturbed(cfg, operator)
        missing = [d.id for d in targets if d.id not in perturbed_texts]
        if missing:
            raise CliError(EXIT_MISSING_RUNS,
                           f"perturbed run for {operator} lacks {len(missing)} target docs (e.g. {missing[:3]})")
        results = runner.score([perturbed_texts[d.id] for d in targets], [d.id for d in targets])
        perturbed_scores = []
        for r in results:
            if isinstance(r, DetectorFailure):
                raise CliError(EXIT_ERROR, f"detector failed on perturbed doc {r.doc_id}: {r.error}")
            perturbed_scores.append(LabeledScore(doc_id=r.doc_id, score=r.score, label=AI))
        perturbed_report = evaluate(perturbed_scores, threshold)
        attack = attack_success_rate(original_report, perturbed_report, operator=operator)
        reports.append(attack)
        row = {
            "detector": args.detector, "operator": operator, "f1": fmt(perturbed_report.f1),
            "acc_g": fmt(perturbed_report.acc_g), "acc_h": fmt(perturbed_report.acc_h),
            "threshold": f"{threshold:.4f}", "asr": fmt(attack.asr), "n": attack.n_samples,
        }
        if cfg.flip_rate_column:
            row["flip_rate_diagnostic"] = fmt(100.0 * flip_rate(original_scores, perturbed_scores, threshold))
        rows.append(row)
        log.info("attack %s via %s: ASR=%.2f", args.detector, operator, attack.asr)

    average = sum(r.asr for r in reports) / len(reports) if reports else 0.0
    rows.append({
        "detector": args.detector, "operator": "average_asr", "f1": "", "acc_g": "",
        "acc_h": "", "threshold": f"{threshold:.4f}", "asr": fmt(average), "n": original_report.n,
    })
    json_path = Path(cfg.output_dir) / f"attack_{args.detector}.json"
    csv_path = Path(cfg.output_dir) / f"attack_{args.detector}.csv"
    atomic_write(json_path, json.dumps({
        "detector": args.detector,
        "threshold": threshold,
        "acc_g_original": original_report.acc_g,
        "attacks": [{"operator": r.operator, "asr": r.asr, "acc_g_original": r.acc_g_original,
                     "acc_g_perturbed": r.acc_g_perturbed, "n_samples": r.n_samples} for r in reports],
        "average_asr": average,
    }, indent=2, sort_keys=True) + "\n")
    atomic_write(csv_path, render_csv(rows, columns))
    write_manifest(Path(cfg.output_dir) / f"attack_{args.detector}_manifest.json", "attack", cfg,
                   {"dataset": cfg.dataset, "detector": args.detector, "operators": operators},
                   [str(json_path), str(csv_path)])
    return EXIT_OK


def cmd_quality(cfg: RunConfig, args: argparse.Namespace) -> int:
    docs = load_dataset(cfg)
    operators = _parse_operators(args.operators)
    targets = _attack_docs(cfg, docs)
    if not targets:
        raise CliError(EXIT_DATASET, f"no ai-labeled documents in split {cfg.attack_split!r}")
    import random as _random
    sample = targets
    if cfg.quality_sample and len(targets) > cfg.quality_sample:
        sample = sorted(_random.Random(cfg.seed).sample(targets, cfg.quality_sample), key=lambda d: d.id)
    client = build_gen_client(cfg, needed=False)

    rows = [quality_row("origin", [(d.text, d.text) for d in sample], client)]
    for operator in (op for op in OPERATORS if op in operators):
        perturbed_texts = _read_perturbed(cfg, operator)
        pairs = [(d.text, perturbed_texts[d.id]) for d in sample if d.id in perturbed_texts]
        if not pairs:
            raise CliError(EXIT_MISSING_RUNS, f"perturbed run for {operator} covers none of the quality sample")
        rows.append(quality_row(operator, pairs, client))

    csv_rows = [{"operator": r.operator, "sim": fmt(r.sim), "flesch": fmt(r.flesch),
                 "gpt": fmt(r.gpt_judge), "ppl": fmt(r.ppl)} for r in rows]
    json_path = Path(cfg.output_dir) / "quality.json"
    csv_path = Path(cfg.output_dir) / "quality.csv"
    atomic_write(json_path, json.dumps({
        "aggregation": "mean",
        "sample_size": len(sample),
        "rows": [{"operator": r.operator, "sim": r.sim, "flesch": r.flesch,
                  "gpt": r.gpt_judge, "ppl": r.ppl} for r in rows],
    }, indent=2, sort_keys=True) + "\n")
    atomic_write(csv_path, render_csv(csv_rows, ["operator", "sim", "flesch", "gpt", "ppl"]))
    write_manifest(Path(cfg.output_dir) / "quality_manifest.json", "quality", cfg,
                   {"dataset": cfg.dataset, "operators": operators}, [str(json_path), str(csv_path)])
    return EXIT_OK


def cmd_augment(cfg: RunConfig, args: argparse.Namespace) -> int:
    docs = load_dataset(cfg)
    train = [d for d in docs if d.split == "train"]
    forbidden = frozenset(d.id for d in docs if d.split in ("reserve", "test"))
    if args.holdout:
        in_domain, target = transfer_split(AugmentationPlan(
            operators=tuple(op for op in OPERATORS if op != args.holdout),
            budget_per_operator=args.budget, seed=cfg.seed, target_holdout=args.holdout))
        operators = tuple(in_domain)
    else:
        operators = tuple(_parse_operators(args.operators))
        target = None
    plan = AugmentationPlan(operators=operators, budget_per_operator=args.budget,
                            seed=cfg.seed, target_holdout=target)
    client = build_gen_client(cfg, needed=any(op in NEURAL_OPERATORS for op in operators))
    try:
        augmented = build_augmented(train, plan, client=client, operator_params=cfg.operators,
                                    forbidden_ids=forbidden, max_workers=cfg.workers)
    except ValueError as exc:
        raise CliError(EXIT_ERROR, str(exc)) from exc

    out_dir = Path(cfg.output_dir) / "augmented"
    data_path = out_dir / "dataset.jsonl"
    out_dir.mkdir(parents=True, exist_ok=True)
    write_documents(data_path, augmented.records)
    outputs = [str(data_path)]

    extra = dict(augmented.manifest)
    if target is not None:
        eval_docs = _attack_docs(cfg, docs)
        spec = PerturbationSpec(operator=target, params=cfg.operators.get(target, {}), seed=cfg.seed)
        results = apply_batch(eval_docs, spec, client=client, max_workers=cfg.workers)
        eval_path = out_dir / "holdout_eval.jsonl"
        lines = []
        for r in results:
            if isinstance(r, PerturbationFailure):
                lines.append(json.dumps({"id": r.original_id, "operator": target, "seed": r.seed, "error": r.error}, ensure_ascii=False))
            else:
                lines.append(json.dumps({"id": r.original_id, "operator": target, "seed": r.seed,
                                         "text": r.perturbed_text, "applied_count": r.applied_count,
                                         "notes": r.notes}, ensure_ascii=False))
        atomic_write(eval_path, "\n".join(lines) + "\n")
        outputs.append(str(eval_path))
        extra["transfer"] = {"target": target, "in_domain": list(operators), "holdout_eval": str(eval_path)}

    write_manifest(out_dir / "manifest.json", "augment", cfg, {"dataset": cfg.dataset}, outputs, extra)
    log.info("augment: %d records (%d perturbed)", len(augmented.records), extra["total_perturbed"])
    return EXIT_OK


# ----------------------------------------------------------------- entrypoint

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="perturbkit", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", "-c", help="YAML run config")
    parser.add_argument("--dataset", help="override config dataset path")
    parser.add_argument("--output-dir", dest="output_dir", help="override config output_dir")
    parser.add_argument("--seed", type=int, help="override config seed")
    parser.add_argument("--workers", type=int, help="override config workers")
    parser.add_argument("--sidecar-endpoint", dest="sidecar_endpoint", help="override sidecar endpoint")
    parser.add_argument("--sidecar-stub", dest="sidecar_stub", choices=["identity"], help="use an in-process stub sidecar")
    parser.add_argument("-v", "--verbose", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("split", help="assign train/reserve/test splits")

    p = sub.add_parser("perturb", help="write one perturbed JSONL per operator")
    p.add_argument("--operators", default="all", help="comma-separated subset or 'all'")

    p = sub.add_parser("calibrate", help="calibrate a detection threshold on the reserve split")
    p.add_argument("--detector", required=True)

    p = sub.add_parser("evaluate", help="detection metrics on the test split at the fixed threshold")
    p.add_argument("--detector", required=True)

    p = sub.add_parser("attack", help="per-operator attack success rates")
    p.add_argument("--detector", required=True)
    p.add_argument("--operators", default="all")

    p = sub.add_parser("quality", help="quality panel over (original, perturbed) pairs")
    p.add_argument("--operators", default="all")

    p = sub.add_parser("augment", help="build an adversarial-augmentation dataset")
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--operators", default="all")
    p.add_argument("--holdout", help="transfer mode: hold one operator out")
    return parser


_COMMANDS = {
    "split": cmd_split,
    "perturb": cmd_perturb,
    "calibrate": cmd_calibrate,
    "evaluate": cmd_evaluate,
    "attack": cmd_attack,
    "quality": cmd_quality,
    "augment": cmd_augment,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args)
        return _COMMANDS[args.command](cfg, args)
    except CliError as exc:
        log.error("%s", exc)
        return exc.exit_code
    except TransportError as exc:
        log.error("sidecar unreachable: %s", exc)
        return EXIT_SIDECAR
    except PerturbkitError as exc:
        log.error("%s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
