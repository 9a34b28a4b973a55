"""Loading, validation, and indexing of articles, labels, engagements, and splits.

File formats (all UTF-8):
  * articles: line-delimited JSON, one object per line with fields
    ``{"id": str, "text": str, "label": 0|1 optional}``
  * engagements: CSV with header ``user_id,article_id,reposts``
  * splits: a single JSON object ``{"labeled_ids": [...], "labels": [...]}``
    with parallel arrays

The canonical dense row ordering of a dataset is by lexicographic article
id, never file order, so every downstream matrix is reproducible across
shuffled inputs.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

N_CLASSES = 2
REAL, FAKE = 0, 1


class DataError(ValueError):
    """Malformed or inconsistent input data."""


class ParseError(DataError):
    """A line of an input file could not be parsed."""

    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class DuplicateIdError(DataError):
    pass


class DanglingReferenceError(DataError):
    pass


@dataclass(frozen=True)
class Article:
    id: str
    text: str


@dataclass(frozen=True)
class EngagementRecord:
    """One merged (user, article) engagement with its total repost count."""

    user_id: str
    article_id: str
    reposts: int


@dataclass(frozen=True)
class SplitSpec:
    """Labeled article ids and their one-hot label rows, in parallel order."""

    labeled_ids: tuple[str, ...]
    one_hot: np.ndarray  # n x C, each row exactly one-hot

    @property
    def n(self) -> int:
        return len(self.labeled_ids)

    @property
    def labels(self) -> np.ndarray:
        """Class index per labeled id."""
        return np.argmax(self.one_hot, axis=1) if self.n else np.zeros(0, dtype=int)


@dataclass(frozen=True)
class Dataset:
    """Immutable article/label/engagement store with a dense article index.

    ``articles`` is sorted by id; article i of ``articles`` occupies dense
    row i everywhere downstream.
    """

    articles: tuple[Article, ...]
    labels: dict[str, int]
    engagements: tuple[EngagementRecord, ...]
    id_to_index: dict[str, int] = field(repr=False)
    dropped_labels: int = 0
    dropped_engagements: int = 0

    @property
    def n_articles(self) -> int:
        return len(self.articles)

    @property
    def article_ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.articles)

    @property
    def n_users(self) -> int:
        return len({e.user_id for e in self.engagements})

    def index_of(self, article_id: str) -> int:
        try:
            return self.id_to_index[article_id]
        except KeyError:
            raise DataError(f"unknown article id {article_id!r}") from None

    def id_of(self, index: int) -> str:
        return self.articles[index].id


def _iter_article_records(path):
    """Yield (line_no, record dict) from a line-delimited article file."""
    allowed = {"id", "text", "label"}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                raise ParseError(path, line_no, "blank line")
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, line_no, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise ParseError(path, line_no, "record is not an object")
            unknown = set(obj) - allowed
            if unknown:
                raise ParseError(path, line_no, f"unknown fields {sorted(unknown)}")
            if not isinstance(obj.get("id"), str) or not obj["id"]:
                raise ParseError(path, line_no, "missing or empty 'id'")
            if not isinstance(obj.get("text"), str):
                raise ParseError(path, line_no, "missing 'text'")
            if "label" in obj and obj["label"] not in (REAL, FAKE):
                raise ParseError(path, line_no, f"label must be 0 or 1, got {obj['label']!r}")
            yield line_no, obj


def load_articles(path) -> list[Article]:
    """Load articles in file order; duplicate ids are rejected."""
    articles: list[Article] = []
    seen: set[str] = set()
    for line_no, obj in _iter_article_records(path):
        if obj["id"] in seen:
            raise DuplicateIdError(f"{path}:{line_no}: duplicate article id {obj['id']!r}")
        seen.add(obj["id"])
        articles.append(Article(id=obj["id"], text=obj["text"]))
    return articles


def load_labels(path) -> dict[str, int]:
    """Extract the optional gold labels from an article file."""
    labels: dict[str, int] = {}
    seen: set[str] = set()
    for line_no, obj in _iter_article_records(path):
        if obj["id"] in seen:
            raise DuplicateIdError(f"{path}:{line_no}: duplicate article id {obj['id']!r}")
        seen.add(obj["id"])
        if "label" in obj:
            labels[obj["id"]] = int(obj["label"])
    return labels


def save_articles(articles, path, labels=None) -> None:
    """Write articles in canonical form: sorted by id, compact JSON lines."""
    labels = labels or {}
    with open(path, "w", encoding="utf-8") as fh:
        for art in sorted(articles, key=lambda a: a.id):
            obj: dict = {"id": art.id, "text": art.text}
            if art.id in labels:
                obj["label"] = int(labels[art.id])
            fh.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n")


ENGAGEMENT_HEADER = ["user_id", "article_id", "reposts"]


def load_engagements(path) -> list[EngagementRecord]:
    """Load engagement rows, merging duplicate (user, article) pairs by
    summing reposts. Returns records sorted by (user_id, article_id)."""
    merged: dict[tuple[str, str], int] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(path, 1, "missing header") from None
        if header != ENGAGEMENT_HEADER:
            raise ParseError(path, 1, f"expected header {','.join(ENGAGEMENT_HEADER)!r}")
        for row in reader:
            line_no = reader.line_num
            if len(row) != 3:
                raise ParseError(path, line_no, f"expected 3 fields, got {len(row)}")
            user_id, article_id, reposts_str = row
            if not user_id or not article_id:
                raise ParseError(path, line_no, "empty user_id or article_id")
            try:
                reposts = int(reposts_str)
            except ValueError:
                raise ParseError(path, line_no, f"reposts not an integer: {reposts_str!r}") from None
            if reposts < 1:
                raise DataError(f"{path}:{line_no}: reposts must be >= 1, got {reposts}")
            key = (user_id, article_id)
            merged[key] = merged.get(key, 0) + reposts
    return [EngagementRecord(u, a, r) for (u, a), r in sorted(merged.items())]


def count_engagement_rows(path) -> int:
    """Number of data rows in an engagement file, before merging."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader, None)
        return sum(1 for _ in reader)


def save_engagements(records, path) -> None:
    """Write engagement records in canonical form: sorted, one row per pair."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ENGAGEMENT_HEADER)
        for rec in sorted(records, key=lambda r: (r.user_id, r.article_id)):
            writer.writerow([rec.user_id, rec.article_id, rec.reposts])


def build_dataset(articles, labels=None, engagements=(), strict: bool = True) -> Dataset:
    """Assemble a Dataset with the canonical dense index.

    Cross-references are validated: labels or engagements pointing at
    unknown article ids raise DanglingReferenceError in strict mode and are
    dropped (with counts recorded on the Dataset) in lenient mode.
    """
    labels = dict(labels or {})
    seen: set[str] = set()
    for art in articles:
        if not art.id:
            raise DataError("article with empty id")
        if art.id in seen:
            raise DuplicateIdError(f"duplicate article id {art.id!r}")
        seen.add(art.id)

    ordered = tuple(sorted(articles, key=lambda a: a.id))
    id_to_index = {a.id: i for i, a in enumerate(ordered)}

    dangling_labels = sorted(set(labels) - seen)
    dropped_labels = 0
    if dangling_labels:
        if strict:
            raise DanglingReferenceError(f"labels reference unknown article ids: {dangling_labels}")
        for aid in dangling_labels:
            del labels[aid]
        dropped_labels = len(dangling_labels)

    merged: dict[tuple[str, str], int] = {}
    dangling_eng: set[str] = set()
    dropped_engagements = 0
    for rec in engagements:
        if rec.reposts < 1:
            raise DataError(f"reposts must be >= 1, got {rec.reposts} for {rec.user_id!r}")
        if rec.article_id not in seen:
            dangling_eng.add(rec.article_id)
            dropped_engagements += 1
            continue
        key = (rec.user_id, rec.article_id)
        merged[key] = merged.get(key, 0) + rec.reposts
    if dangling_eng and strict:
        raise DanglingReferenceError(
            f"engagements reference unknown article ids: {sorted(dangling_eng)}"
        )

    return Dataset(
        articles=ordered,
        labels=labels,
        engagements=tuple(EngagementRecord(u, a, r) for (u, a), r in sorted(merged.items())),
        id_to_index=id_to_index,
        dropped_labels=dropped_labels,
        dropped_engagements=dropped_engagements,
    )


def load_dataset(articles_path, engagements_path=None, strict: bool = True) -> Dataset:
    """Load and assemble a dataset from an article file and an optional
    engagement file."""
    articles = load_articles(articles_path)
    labels = load_labels(articles_path)
    engagements = load_engagements(engagements_path) if engagements_path else ()
    return build_dataset(articles, labels, engagements, strict=strict)


def make_one_hot(class_indices, n_classes: int = N_CLASSES) -> np.ndarray:
    classes = np.asarray(class_indices, dtype=int)
    if classes.size and (classes.min() < 0 or classes.max() >= n_classes):
        raise DataError(f"class index out of range [0, {n_classes})")
    one_hot = np.zeros((len(classes), n_classes))
    one_hot[np.arange(len(classes)), classes] = 1.0
    return one_hot


def load_split(path, n_classes: int = N_CLASSES) -> SplitSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(path, exc.lineno, f"invalid JSON: {exc.msg}") from exc
    if not isinstance(obj, dict) or set(obj) != {"labeled_ids", "labels"}:
        raise DataError(f"{path}: split must be an object with 'labeled_ids' and 'labels'")
    ids, labels = obj["labeled_ids"], obj["labels"]
    if len(ids) != len(labels):
        raise DataError(f"{path}: labeled_ids and labels must be parallel arrays")
    if len(set(ids)) != len(ids):
        raise DuplicateIdError(f"{path}: duplicate ids in split")
    return SplitSpec(labeled_ids=tuple(ids), one_hot=make_one_hot(labels, n_classes))


def save_split(split: SplitSpec, path) -> None:
    obj = {
        "labeled_ids": list(split.labeled_ids),
        "labels": [int(c) for c in split.labels],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False, separators=(",", ":"))
        fh.write("\n")


def validate_split(dataset: Dataset, split: SplitSpec) -> dict:
    """Check a split against a dataset and report its class balance.

    Returns ``{"n", "real", "fake", "balanced"}``; never mutates either
    argument. An empty split is vacuously balanced.
    """
    if len(set(split.labeled_ids)) != len(split.labeled_ids):
        raise DuplicateIdError("duplicate ids in split")
    unknown = [aid for aid in split.labeled_ids if aid not in dataset.id_to_index]
    if unknown:
        raise DataError(f"split references unknown article ids: {unknown}")
    if split.one_hot.shape != (split.n, N_CLASSES):
        raise DataError(f"one_hot shape {split.one_hot.shape} != ({split.n}, {N_CLASSES})")
    is_unit = np.isin(split.one_hot, (0.0, 1.0)).all()
    if not is_unit or (split.n and not (split.one_hot.sum(axis=1) == 1.0).all()):
        raise DataError("one_hot rows must contain a single 1 and sum to exactly 1")
    counts = split.one_hot.sum(axis=0).astype(int) if split.n else np.zeros(N_CLASSES, int)
    return {
        "n": split.n,
        "real": int(counts[REAL]),
        "fake": int(counts[FAKE]),
        "balanced": bool(counts[REAL] == counts[FAKE]),
    }
