"""Nonparametric comparison statistics: medians/IQR, Mann-Whitney U, A-test."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

EXACT_MAX_TOTAL = 14
MEDIUM_EFFECT = 0.63
LARGE_EFFECT = 0.70


def _midranks(values) -> list[float]:
    order = sorted(range(len(values)), key=lambda k: values[k])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def u_statistic(x, y) -> float:
    """U for sample ``x`` (number of (x, y) pairs with x > y, ties half)."""
    x, y = list(x), list(y)
    ranks = _midranks(x + y)
    return sum(ranks[:len(x)]) - len(x) * (len(x) + 1) / 2


def _exact_u_distribution(ranks2: list[int], n1: int) -> Counter:
    """Counts of doubled rank sums over all size-n1 subsets of ``ranks2``."""
    # dp[k] maps rank-sum -> number of k-subsets seen so far
    dp = [Counter() for _ in range(n1 + 1)]
    dp[0][0] = 1
    for r in ranks2:
        for k in range(min(n1, len(ranks2)), 0, -1):
            for s, c in dp[k - 1].items():
                dp[k][s + r] += c
    return dp[n1]


def mann_whitney(x, y, method: str = "auto") -> float:
    """Two-sided p-value for the Mann-Whitney U test.

    ``method`` is ``exact`` (permutation distribution of U, ties handled by
    midranks), ``approx`` (normal approximation with tie and continuity
    correction) or ``auto`` (exact when the pooled size is at most 14).
    """
    x, y = [float(v) for v in x], [float(v) for v in y]
    n1, n2 = len(x), len(y)
    if n1 == 0 or n2 == 0:
        raise ValueError("Mann-Whitney test needs two non-empty samples")
    if method == "auto":
        method = "exact" if n1 + n2 <= EXACT_MAX_TOTAL else "approx"
    ranks = _midranks(x + y)
    u = sum(ranks[:n1]) - n1 * (n1 + 1) / 2
    if method == "exact":
        ranks2 = [int(round(2 * r)) for r in ranks]
        dist = _exact_u_distribution(ranks2, n1)
        total = sum(dist.values())
        u2 = 2 * u + n1 * (n1 + 1)  # doubled rank sum of the observed x
        lower = sum(c for s, c in dist.items() if s <= u2 + 1e-9) / total
        upper = sum(c for s, c in dist.items() if s >= u2 - 1e-9) / total
        return min(1.0, 2 * min(lower, upper))
    if method != "approx":
        raise ValueError(f"unknown method {method!r}")
    n = n1 + n2
    ties = sum(t ** 3 - t for t in Counter(x + y).values())
    var = n1 * n2 / 12.0 * ((n + 1) - ties / (n * (n - 1))) if n > 1 else 0.0
    if var <= 0:
        return 1.0
    z = max(0.0, abs(u - n1 * n2 / 2.0) - 0.5) / math.sqrt(var)
    return min(1.0, math.erfc(z / math.sqrt(2.0)))


def a_test(x, y) -> float:
    """Vargha-Delaney A: probability that a draw from ``x`` exceeds one from ``y``."""
    x, y = list(x), list(y)
    if not x or not y:
        raise ValueError("A-test needs two non-empty samples")
    return u_statistic(x, y) / (len(x) * len(y))


def effect_label(a: float) -> str:
    a = max(a, 1 - a)
    return "large" if a >= LARGE_EFFECT else "medium" if a >= MEDIUM_EFFECT else "small"


@dataclass(frozen=True)
class Summary:
    runs: int
    time_median: float
    time_iqr: float
    collisions_median: float
    collisions_iqr: float
    fail_rate: float


def median_iqr(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("cannot summarise an empty sample")
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    return float(med), float(q3 - q1)


def summarize(results) -> Summary:
    results = list(results)
    if not results:
        raise ValueError("cannot summarise an empty result list")
    tm, ti = median_iqr([r.time for r in results])
    cm, ci = median_iqr([r.collisions for r in results])
    fails = sum(bool(r.failed) for r in results)
    return Summary(len(results), tm, ti, cm, ci, fails / len(results))
