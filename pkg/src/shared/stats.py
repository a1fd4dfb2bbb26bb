"""
Statistical helpers shared by the harness and the test-suite.

DESIGN:
    Interval arithmetic and goodness-of-fit come from scipy.stats; this module
    only fixes conventions (clipping, bin pooling, which CI method a name maps to).
"""

from __future__ import annotations

import math
from typing import Hashable, Mapping, Sequence

import numpy as np
from scipy import stats

from src.config import settings

_CI_METHODS = {"wilson": "wilson", "clopper-pearson": "exact"}


def proportion_interval(
    successes: int,
    trials: int,
    level: float | None = None,
    method: str | None = None,
) -> tuple[float, float]:
    """
    Confidence interval for a binomial proportion.

    Wilson by default, Clopper-Pearson ("clopper-pearson") on request.
    The interval always contains successes/trials.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    level = settings.CI_LEVEL if level is None else level
    method = settings.CI_METHOD if method is None else method
    if method not in _CI_METHODS:
        raise ValueError(f"unknown CI method: {method}")

    ci = stats.binomtest(successes, trials).proportion_ci(
        confidence_level=level, method=_CI_METHODS[method]
    )
    p_hat = successes / trials
    lo = min(max(0.0, float(ci.low)), p_hat)
    hi = max(min(1.0, float(ci.high)), p_hat)
    return lo, hi


def standard_error(frequency: float, trials: int) -> float:
    """Binomial standard error of an empirical frequency."""
    return math.sqrt(max(frequency * (1.0 - frequency), 0.0) / trials)


def chi_square_pvalue(
    observed: Sequence[float], expected_probs: Sequence[float], min_expected: float = 5.0
) -> float:
    """
    Goodness-of-fit p-value of observed counts against a discrete law.

    Adjacent bins with expected count below `min_expected` are pooled.
    A bin with zero expected mass and nonzero count returns 0.
    """
    observed = np.asarray(observed, dtype=float)
    probs = np.asarray(expected_probs, dtype=float)
    total = observed.sum()
    expected = probs * total

    if np.any((expected <= 0) & (observed > 0)):
        return 0.0

    pooled_obs: list[float] = []
    pooled_exp: list[float] = []
    acc_obs = acc_exp = 0.0
    for o, e in zip(observed, expected):
        if e <= 0:
            continue
        acc_obs += o
        acc_exp += e
        if acc_exp >= min_expected:
            pooled_obs.append(acc_obs)
            pooled_exp.append(acc_exp)
            acc_obs = acc_exp = 0.0
    if acc_exp > 0:
        if pooled_exp:
            pooled_obs[-1] += acc_obs
            pooled_exp[-1] += acc_exp
        else:
            pooled_obs.append(acc_obs)
            pooled_exp.append(acc_exp)

    if len(pooled_exp) < 2:
        return 1.0
    # rescale for float drift so both vectors share a total
    f_exp = np.asarray(pooled_exp) * (sum(pooled_obs) / sum(pooled_exp))
    return float(stats.chisquare(pooled_obs, f_exp).pvalue)


def two_sample_chi_square_pvalue(
    first: Mapping[Hashable, int], second: Mapping[Hashable, int], min_expected: float = 5.0
) -> float:
    """
    Homogeneity p-value for two samples of a discrete outcome (outcome -> count).

    Outcomes whose expected cell count falls below `min_expected` in either
    row are pooled into one bin before the contingency test.
    """
    n1, n2 = sum(first.values()), sum(second.values())
    if n1 < 1 or n2 < 1:
        raise ValueError("both samples need at least one observation")
    share = min(n1, n2) / (n1 + n2)

    kept: list[tuple[int, int]] = []
    rest = [0, 0]
    for key in set(first) | set(second):
        a, b = first.get(key, 0), second.get(key, 0)
        if (a + b) * share >= min_expected:
            kept.append((a, b))
        else:
            rest[0] += a
            rest[1] += b
    if rest[0] + rest[1] > 0:
        if (rest[0] + rest[1]) * share >= min_expected or not kept:
            kept.append((rest[0], rest[1]))
        else:
            smallest = min(range(len(kept)), key=lambda i: sum(kept[i]))
            a, b = kept[smallest]
            kept[smallest] = (a + rest[0], b + rest[1])

    if len(kept) < 2:
        return 1.0
    table = np.array(kept, dtype=float).T
    return float(stats.chi2_contingency(table, correction=False).pvalue)
