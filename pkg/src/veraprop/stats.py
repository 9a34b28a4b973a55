"""Paired Wilcoxon signed-rank test with the two-sided normal
approximation, as used to compare per-seed accuracy series.

Hand-rolled on purpose: the test suite cross-checks it against scipy, so
the two routes stay independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float  # min of the signed-rank sums
    p_value: float  # two-sided, normal approximation
    n_effective: int  # pairs remaining after zero differences are dropped


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ascending ranks with ties sharing their average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def wilcoxon_signed_rank(a, b) -> WilcoxonResult:
    """Two-sided paired test of a against b.

    Zero differences are dropped; ties in |difference| take average ranks;
    the variance gets the usual tie correction and the z-score a 0.5
    continuity correction. Requires at least 6 pairs and at least one
    nonzero difference.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"paired series must be equal-length 1-D, got {a.shape} and {b.shape}")
    if len(a) < 6:
        raise ValueError(f"need at least 6 pairs, got {len(a)}")

    diff = a - b
    diff = diff[diff != 0.0]
    n = len(diff)
    if n == 0:
        raise ValueError("all paired differences are zero; the test is undefined")

    ranks = _average_ranks(np.abs(diff))
    r_plus = float(ranks[diff > 0].sum())
    r_minus = float(ranks[diff < 0].sum())
    statistic = min(r_plus, r_minus)

    mean = n * (n + 1) / 4.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_sizes = np.unique(ranks, return_counts=True)
    variance -= (tie_sizes**3 - tie_sizes).sum() / 48.0
    se = math.sqrt(variance)

    continuity = 0.5 * np.sign(statistic - mean)
    z = (statistic - mean - continuity) / se
    p_value = math.erfc(abs(z) / math.sqrt(2.0))  # == 2 * (1 - Phi(|z|))
    return WilcoxonResult(statistic=statistic, p_value=p_value, n_effective=n)
