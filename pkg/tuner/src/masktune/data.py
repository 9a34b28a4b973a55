"""Readers for the core toolkit's file formats.

The article and split files are the wire contract with the core pipeline;
these parsers accept exactly what the core emits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class ArticleRecord:
    id: str
    text: str
    label: int | None = None


def read_articles(path) -> list[ArticleRecord]:
    """Line-delimited JSON articles, file order preserved."""
    records: list[ArticleRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{line_no}: invalid JSON: {exc.msg}") from exc
            if not isinstance(obj.get("id"), str) or not obj["id"]:
                raise InputError(f"{path}:{line_no}: missing or empty 'id'")
            if obj["id"] in seen:
                raise InputError(f"{path}:{line_no}: duplicate article id {obj['id']!r}")
            seen.add(obj["id"])
            records.append(ArticleRecord(
                id=obj["id"],
                text=obj.get("text", ""),
                label=obj.get("label"),
            ))
    return records


def read_split(path) -> tuple[list[str], list[int]]:
    """Split file: {"labeled_ids": [...], "labels": [...]} parallel arrays."""
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    ids, labels = obj.get("labeled_ids"), obj.get("labels")
    if ids is None or labels is None or len(ids) != len(labels):
        raise InputError(f"{path}: split needs parallel 'labeled_ids' and 'labels'")
    if any(label not in (0, 1) for label in labels):
        raise InputError(f"{path}: labels must be 0 or 1")
    return list(ids), [int(label) for label in labels]
