"""Per-user fake-news affinity: the fraction of a user's news engagements
that target fake articles, restricted to active users.

Two weighting modes are supported. Under ``by-article`` each engaged
article counts once; under ``by-repost`` every repost counts. The activity
threshold ``t_u`` filters users in the same mode, so the affinity score
and the filter stay consistent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import FAKE, DataError, Dataset

WEIGHTINGS = ("by-article", "by-repost")


class UnlabeledArticleError(DataError):
    pass


@dataclass(frozen=True)
class UserAffinity:
    engagement_count: int
    fake_count: int
    fna: float


@dataclass(frozen=True)
class Histogram:
    bin_edges: np.ndarray  # bins+1 edges, first 0, last 1
    counts: np.ndarray


def compute_fna(dataset: Dataset, t_u: int, weighting: str = "by-article") -> dict[str, UserAffinity]:
    """Affinity table over users whose activity is at least ``t_u``.

    Requires every engaged article to carry a gold label; this is an
    analysis over fully labeled data, not a prediction step.
    """
    if t_u < 1:
        raise ValueError(f"t_u must be >= 1, got {t_u}")
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}, got {weighting!r}")

    unlabeled = sorted({e.article_id for e in dataset.engagements} - set(dataset.labels))
    if unlabeled:
        raise UnlabeledArticleError(f"engaged articles without gold labels: {unlabeled}")

    totals: dict[str, int] = {}
    fakes: dict[str, int] = {}
    for rec in dataset.engagements:
        weight = 1 if weighting == "by-article" else rec.reposts
        totals[rec.user_id] = totals.get(rec.user_id, 0) + weight
        if dataset.labels[rec.article_id] == FAKE:
            fakes[rec.user_id] = fakes.get(rec.user_id, 0) + weight

    table = {}
    for user_id in sorted(totals):
        count = totals[user_id]
        if count < t_u:
            continue
        fake_count = fakes.get(user_id, 0)
        table[user_id] = UserAffinity(
            engagement_count=count,
            fake_count=fake_count,
            fna=fake_count / count,
        )
    return table


def fna_histogram(table: dict[str, UserAffinity], bins: int) -> Histogram:
    """Uniform-width histogram of affinity scores on [0, 1].

    Every bin is right-exclusive except the last, which includes 1.0.
    """
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    if not table:
        raise DataError("empty affinity table")
    values = np.array([ua.fna for ua in table.values()])
    counts, edges = np.histogram(values, bins=bins, range=(0.0, 1.0))
    return Histogram(bin_edges=edges, counts=counts)


def extreme_mass(hist: Histogram) -> int:
    """Users in the first and last bins combined."""
    return int(hist.counts[0] + hist.counts[-1])


def save_histogram(hist: Histogram, path) -> None:
    """Write ``bin_lo,bin_hi,count`` rows plus a trailing summary line."""
    total = int(hist.counts.sum())
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("bin_lo,bin_hi,count\n")
        for lo, hi, count in zip(hist.bin_edges[:-1], hist.bin_edges[1:], hist.counts):
            fh.write(f"{lo:.17g},{hi:.17g},{int(count)}\n")
        fh.write(f"# total_users={total} extreme_mass={extreme_mass(hist)}\n")
