"""Accuracy uncertainty, effect size and two-sample tests."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats as _sps

SMALL_BELOW, MEDIUM_AT, LARGE_AT = 0.3, 0.5, 0.8
EXACT_U_MAX_CELLS = 64


class DegenerateVarianceError(ValueError):
    """The pooled or combined standard deviation is zero."""


def standard_error(p: float, n: int) -> float:
    """Binomial standard error sqrt(p(1-p)/n) of an accuracy proportion."""
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    return math.sqrt(p * (1.0 - p) / n)


def _mean(xs: Sequence[float]) -> float:
    return math.fsum(xs) / len(xs)


def sample_variance(xs: Sequence[float]) -> float:
    """Bessel-corrected variance."""
    if len(xs) < 2:
        raise ValueError("need at least two values")
    m = _mean(xs)
    return math.fsum((x - m) ** 2 for x in xs) / (len(xs) - 1)


def sample_sd(xs: Sequence[float]) -> float:
    return math.sqrt(sample_variance(xs))


def classify_effect(d: float) -> str:
    """Bands: |d| < 0.3 small, >= 0.5 medium, >= 0.8 large; in between is
    labeled ``small-to-medium``."""
    a = abs(d)
    if a >= LARGE_AT:
        return "large"
    if a >= MEDIUM_AT:
        return "medium"
    if a < SMALL_BELOW:
        return "small"
    return "small-to-medium"


@dataclass(frozen=True)
class EffectSizeResult:
    d: float
    pooled_sd: float
    mean_a: float
    mean_b: float
    n_a: int
    n_b: int
    label: str


def cohens_d(a: Sequence[float], b: Sequence[float]) -> EffectSizeResult:
    """(mean_a - mean_b) / pooled SD with Bessel-corrected group variances."""
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each group needs at least two values")
    na, nb = len(a), len(b)
    pooled = math.sqrt(((na - 1) * sample_variance(a) + (nb - 1) * sample_variance(b))
                       / (na + nb - 2))
    if pooled == 0.0:
        raise DegenerateVarianceError("pooled standard deviation is zero; effect size undefined")
    ma, mb = _mean(a), _mean(b)
    d = (ma - mb) / pooled
    return EffectSizeResult(d, pooled, ma, mb, na, nb, classify_effect(d))


@dataclass(frozen=True)
class HypothesisTestResult:
    test: str
    statistic: float
    p_value: float
    df: float | None = None
    method: str = ""


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> HypothesisTestResult:
    """Two-sided Welch test with Welch-Satterthwaite degrees of freedom."""
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each group needs at least two values")
    va, vb = sample_variance(a) / len(a), sample_variance(b) / len(b)
    se2 = va + vb
    if se2 == 0.0:
        raise DegenerateVarianceError("both groups have zero variance; t is undefined")
    t = (_mean(a) - _mean(b)) / math.sqrt(se2)
    # scaled form of se2^2 / (va^2/(na-1) + vb^2/(nb-1)); squares of tiny
    # variances would underflow
    wa, wb = va / se2, vb / se2
    df = 1.0 / (wa * wa / (len(a) - 1) + wb * wb / (len(b) - 1))
    p = min(1.0, 2.0 * float(_sps.t.sf(abs(t), df)))
    return HypothesisTestResult("welch-t", t, p, df, "t-distribution")


def midranks(values: Sequence[float]) -> list[float]:
    """1-based ranks with ties sharing their average rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def u_statistic(a: Sequence[float], b: Sequence[float]) -> float:
    """U for group ``a``: pairs with a > b count 1, ties 1/2."""
    ranks = midranks([*a, *b])
    return math.fsum(ranks[: len(a)]) - len(a) * (len(a) + 1) / 2.0


def _exact_u_distribution(pooled: Sequence[float], n1: int) -> Counter[int]:
    """Counts of doubled U over all size-n1 subsets of ``pooled``.

    Dynamic programming over items on doubled midranks, so ties stay exact
    integers.
    """
    ranks2 = [int(round(2 * r)) for r in midranks(pooled)]
    # table[k] maps doubled rank sum -> number of k-subsets
    table: list[Counter[int]] = [Counter() for _ in range(n1 + 1)]
    table[0][0] = 1
    for r in ranks2:
        for k in range(min(n1, len(pooled)), 0, -1):
            prev = table[k - 1]
            if prev:
                cur = table[k]
                for s, c in prev.items():
                    cur[s + r] += c
    offset = n1 * (n1 + 1)  # doubled n1(n1+1)/2
    return Counter({s - offset: c for s, c in table[n1].items()})


def mann_whitney_u(a: Sequence[float], b: Sequence[float]) -> HypothesisTestResult:
    """Two-sided Mann-Whitney U with midranks.

    Exact permutation p-value when n1*n2 <= 64, otherwise the normal
    approximation with tie and continuity corrections.
    """
    n1, n2 = len(a), len(b)
    if n1 < 1 or n2 < 1:
        raise ValueError("each group needs at least one value")
    u = u_statistic(a, b)
    mu = n1 * n2 / 2.0
    if n1 * n2 <= EXACT_U_MAX_CELLS:
        dist = _exact_u_distribution([*a, *b], n1)
        total = sum(dist.values())
        obs = abs(2 * u - 2 * mu)
        extreme = sum(c for s2, c in dist.items() if abs(s2 - 2 * mu) >= obs - 1e-9)
        return HypothesisTestResult("mann-whitney-u", u, min(1.0, extreme / total), None, "exact")
    n = n1 + n2
    ties = Counter([*a, *b]).values()
    tie_term = math.fsum(t ** 3 - t for t in ties) / (n * (n - 1))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var <= 0.0:
        return HypothesisTestResult("mann-whitney-u", u, 1.0, None, "normal")
    z = max(0.0, abs(u - mu) - 0.5) / math.sqrt(var)
    return HypothesisTestResult("mann-whitney-u", u, min(1.0, math.erfc(z / math.sqrt(2.0))),
                                None, "normal")


@dataclass(frozen=True)
class BootstrapCI:
    level: float
    lo: float
    hi: float
    mean: float
    resamples: int
    seed: int


def bootstrap_ci(values: Sequence[float], level: float = 0.95, resamples: int = 10000,
                 seed: int = 0) -> BootstrapCI:
    """Percentile interval for the mean.

    Resampling draws multinomial counts over the distinct values, which is
    equivalent to resampling observations with replacement.
    """
    if len(values) == 0:
        raise ValueError("bootstrap needs at least one value")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    if resamples < 1:
        raise ValueError("resamples must be >= 1")
    freq = Counter(float(v) for v in values)
    support = np.array(sorted(freq))
    probs = np.array([freq[v] for v in sorted(freq)], dtype=float) / len(values)
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(len(values), probs, size=resamples)
    means = counts @ support / len(values)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(means, [alpha, 1.0 - alpha])
    mean = _mean([float(v) for v in values])
    if len(freq) == 1:
        # constant data; avoid float drift in counts @ support / n
        lo = hi = mean
    return BootstrapCI(level, float(lo), float(hi), mean, resamples, seed)
