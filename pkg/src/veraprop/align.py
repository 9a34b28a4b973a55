"""Confidence-informed refinement of base predictions over the readership
graph.

The enhanced confidence matrix starts from the base predictions, replaces
labeled-article rows with their one-hot ground truth, and hardens the most
confident unlabeled rows to one-hot pseudo-labels. Propagating that matrix
k steps over the normalized readership graph yields the aligned scores;
hard labels are the row-wise argmax of the raw propagated values, which
are deliberately not renormalized (argmax is scale-free and the raw
per-step scores are what the dump format exposes for inspection).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .data import DataError, Dataset, SplitSpec
from .graph import ProximityGraph
from .predictions import validate_prediction_matrix

# Row provenance in a ConfidenceMatrix.
SOFT = 0
GROUND_TRUTH = 1
PSEUDO_LABEL = 2

TAG_NAMES = {SOFT: "soft", GROUND_TRUTH: "ground-truth", PSEUDO_LABEL: "pseudo-label"}


@dataclass(frozen=True)
class ConfidenceMatrix:
    """Base predictions enhanced with ground truth and pseudo-labels."""

    values: np.ndarray  # N x C, row-stochastic
    row_tags: np.ndarray  # N, values in {SOFT, GROUND_TRUTH, PSEUDO_LABEL}
    threshold: float | None  # pseudo-labeling cutoff actually used, if any

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class AlignedScores:
    """Propagated scores, optionally with one snapshot per step.

    ``snapshots[s]`` is the matrix after s steps; index 0 is the input.
    """

    values: np.ndarray
    steps: int
    snapshots: tuple[np.ndarray, ...] | None = None


def inject_ground_truth(p: np.ndarray, split: SplitSpec, id_to_index: dict[str, int]) -> np.ndarray:
    """Copy of ``p`` with each labeled article's row replaced by its
    one-hot label."""
    p = np.asarray(p, dtype=np.float64)
    out = p.copy()
    for row, aid in enumerate(split.labeled_ids):
        if aid not in id_to_index:
            raise DataError(f"split references unknown article id {aid!r}")
        out[id_to_index[aid]] = split.one_hot[row]
    return out


def selection_rank(t_p: float, m: int) -> int:
    """1-indexed ascending rank of the nearest-rank percentile, computed in
    exact rational arithmetic so boundary percentiles never drift by one."""
    return math.ceil(Fraction(t_p) * m / 100)


def thresholded_pl(p_u: np.ndarray, t_p: float) -> tuple[np.ndarray, float]:
    """Harden the most confident unlabeled rows to one-hot pseudo-labels.

    A row's confidence is its maximum class probability. The cutoff is the
    nearest-rank t_p-th percentile of the confidences; every row at or
    above it becomes one-hot at its argmax (ties toward class 0), the rest
    pass through unchanged. Returns the updated rows and the cutoff.
    """
    if not 0.0 < t_p <= 100.0:
        raise ValueError(f"t_p must be in (0, 100], got {t_p}")
    p_u = np.asarray(p_u, dtype=np.float64)
    if p_u.shape[0] < 1:
        raise DataError("thresholded pseudo-labeling needs at least one unlabeled row")

    confidence = p_u.max(axis=1)
    threshold = float(np.sort(confidence)[selection_rank(t_p, p_u.shape[0]) - 1])
    selected = confidence >= threshold

    out = p_u.copy()
    hardened = np.zeros_like(p_u[selected])
    hardened[np.arange(hardened.shape[0]), np.argmax(p_u[selected], axis=1)] = 1.0
    out[selected] = hardened
    return out, threshold


def build_confidence(
    p: np.ndarray,
    split: SplitSpec,
    dataset: Dataset,
    t_p: float = 95.0,
    use_tpl: bool = True,
) -> ConfidenceMatrix:
    """Assemble the enhanced confidence matrix from base predictions."""
    p = validate_prediction_matrix(p)
    if p.shape[0] != dataset.n_articles:
        raise DataError(f"prediction matrix has {p.shape[0]} rows for {dataset.n_articles} articles")

    values = inject_ground_truth(p, split, dataset.id_to_index)
    tags = np.full(dataset.n_articles, SOFT, dtype=np.int8)
    labeled = np.array([dataset.index_of(aid) for aid in split.labeled_ids], dtype=int)
    tags[labeled] = GROUND_TRUTH

    threshold = None
    unlabeled = np.setdiff1d(np.arange(dataset.n_articles), labeled)
    if use_tpl and unlabeled.size:
        hardened, threshold = thresholded_pl(p[unlabeled], t_p)
        values[unlabeled] = hardened
        pseudo = unlabeled[p[unlabeled].max(axis=1) >= threshold]
        tags[pseudo] = PSEUDO_LABEL
    return ConfidenceMatrix(values=values, row_tags=tags, threshold=threshold)


def propagate(graph: ProximityGraph, h, k: int, record_steps: bool = False) -> AlignedScores:
    """k successive sparse left-multiplications of the confidence matrix by
    the normalized adjacency; the matrix power is never formed."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    values = np.asarray(h.values if isinstance(h, ConfidenceMatrix) else h, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != graph.n:
        raise DataError(f"confidence matrix shape {values.shape} does not match graph size {graph.n}")

    snapshots = [values.copy()] if record_steps else None
    for _ in range(k):
        values = graph.a_t @ values
        if record_steps:
            snapshots.append(values.copy())
    return AlignedScores(
        values=values,
        steps=k,
        snapshots=tuple(snapshots) if record_steps else None,
    )


def predict_labels(scores: AlignedScores | np.ndarray, exclude=()) -> dict[int, int]:
    """Row-wise argmax labels for every row not in ``exclude``.

    Ties break toward the lower class index (class 0), which argmax's
    first-maximum rule gives for free.
    """
    values = scores.values if isinstance(scores, AlignedScores) else np.asarray(scores)
    excluded = set(int(i) for i in exclude)
    labels = np.argmax(values, axis=1)
    return {i: int(labels[i]) for i in range(values.shape[0]) if i not in excluded}


def ambiguous_rows(scores: AlignedScores | np.ndarray) -> np.ndarray:
    """Rows whose argmax was decided by the tie rule (all-zero rows
    included); surfaced in reports rather than hidden."""
    values = scores.values if isinstance(scores, AlignedScores) else np.asarray(scores)
    max_count = (values == values.max(axis=1, keepdims=True)).sum(axis=1)
    return np.flatnonzero(max_count > 1)


def save_alignment_csv(dataset: Dataset, scores: AlignedScores, path) -> None:
    """Dump per-step scores as ``article_id,step,score_real,score_fake``.

    Requires the scores to carry snapshots; step 0 is the confidence
    matrix before any propagation.
    """
    if scores.snapshots is None:
        raise DataError("per-step dump requires propagate(..., record_steps=True)")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("article_id,step,score_real,score_fake\n")
        for step, snap in enumerate(scores.snapshots):
            for aid, row in zip(dataset.article_ids, snap):
                fh.write(f"{aid},{step},{row[0]:.17g},{row[1]:.17g}\n")
