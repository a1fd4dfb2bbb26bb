"""Exact binomial point masses and upper tails."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import numpy as np
from scipy import special, stats

from src.errors import InfeasibleParametersError, OracleSizeError

MAX_TRIALS = 10**6


def binomial_exact(N: int, P, j: int, tail: bool = False) -> float | Fraction:
    """
    P(Bin(N,P) = j), or P(Bin(N,P) >= j) with tail=True.

    Rational P gives an exact Fraction; otherwise log-space accumulation
    (logpmf + logsumexp) keeps small tails accurate.
    """
    if N > MAX_TRIALS:
        raise OracleSizeError(f"N={N} exceeds {MAX_TRIALS}")
    if N < 0 or not 0 <= P <= 1:
        raise InfeasibleParametersError("need N >= 0 and 0 <= P <= 1")

    if isinstance(P, Rational):
        P = Fraction(P)
        lo = max(j, 0) if tail else j
        hi = N if tail else j
        if lo > N or hi < 0:
            return Fraction(0)
        return sum(
            (math.comb(N, b) * P**b * (1 - P) ** (N - b) for b in range(lo, hi + 1)),
            Fraction(0),
        )

    if not tail:
        if j < 0 or j > N:
            return 0.0
        return float(np.exp(stats.binom.logpmf(j, N, P)))
    if j <= 0:
        return 1.0
    if j > N:
        return 0.0
    support = np.arange(j, N + 1)
    return float(min(1.0, np.exp(special.logsumexp(stats.binom.logpmf(support, N, P)))))
