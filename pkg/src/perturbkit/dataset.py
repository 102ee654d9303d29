"""Labeled document records and their JSONL serialization.

One object per line: ``{"id", "text", "label", "domain", "split"}``.
Unknown fields are kept in ``Document.extras`` and written back on round-trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

HUMAN = "human"
AI = "ai"
LABELS = (HUMAN, AI)
SPLITS = ("train", "reserve", "test")

_KNOWN_FIELDS = ("id", "text", "label", "domain", "split")


@dataclass(frozen=True)
class Document:
    """A labeled text sample; ``id`` must be unique within a dataset."""

    id: str
    text: str
    label: str
    domain: str = ""
    split: str | None = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("document id must be non-empty")
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {self.label!r}")
        if self.split is not None and self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}, got {self.split!r}")

    def with_split(self, split: str) -> "Document":
        return replace(self, split=split)


def document_from_record(record: dict) -> Document:
    extras = {k: v for k, v in record.items() if k not in _KNOWN_FIELDS}
    return Document(
        id=str(record["id"]),
        text=record["text"],
        label=record["label"],
        domain=record.get("domain", ""),
        split=record.get("split"),
        extras=extras,
    )


def document_to_record(doc: Document) -> dict:
    record = {"id": doc.id, "text": doc.text, "label": doc.label, "domain": doc.domain}
    if doc.split is not None:
        record["split"] = doc.split
    record.update(doc.extras)
    return record


def read_documents(path: str | Path) -> list[Document]:
    """Load a JSONL dataset, enforcing unique ids."""
    docs: list[Document] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                doc = document_from_record(record)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad dataset record: {exc}") from exc
            if doc.id in seen:
                raise ValueError(f"{path}:{lineno}: duplicate document id {doc.id!r}")
            seen.add(doc.id)
            docs.append(doc)
    return docs


def write_documents(path: str | Path, docs: Iterable[Document]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(document_to_record(doc), ensure_ascii=False))
            fh.write("\n")
