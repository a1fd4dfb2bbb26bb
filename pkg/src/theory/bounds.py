"""
Closed-form bounds used in the component-size arguments.

PURPOSE:
    q-curves, ballot-type bounds on stay-positive walks, binomial point and
    Chernoff bounds, and the exponential-tilt parameters.

DESIGN:
    Every evaluator refuses inputs outside its hypotheses with
    HypothesisError.
    Ballot bounds keep Fractions exact when handed Fractions, so the
    comparison against the lattice DP runs in rationals.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Sequence

from scipy import stats

from src.errors import HypothesisError, InfeasibleParametersError


def q_upper(T: float, p: float, d: int, n: int) -> float:
    """p (1 - 2/d) T (T-1) / (2n)."""
    return p * (1 - 2 / d) * T * (T - 1) / (2 * n)


def q_lower_curve(t: float, p: float, d: int, n: int, A: float) -> float:
    """p (1 - 2/d) t^2 / (2n) + A n^{4/15}."""
    return p * (1 - 2 / d) * t * t / (2 * n) + A * n ** (4.0 / 15.0)


# ---------------------------------------------------------------------------
# Ballot-type bounds
# ---------------------------------------------------------------------------


def _convolve_power(law: dict[int, object], times: int) -> dict[int, object]:
    """Law of the sum of `times` i.i.d. copies, by repeated exact convolution."""
    total: dict[int, object] = {0: 1}
    for _ in range(times):
        step: dict[int, object] = {}
        for s, ps in total.items():
            for x, px in law.items():
                step[s + x] = step.get(s + x, 0) + ps * px
        total = step
    return total


def ballot_bound_generic(
    t: int, k: int, h: int, values: Sequence[int], probs: Sequence
) -> float | Fraction:
    """
    (1 / P(X=h)) (k/(t+1)) P(X_1 + ... + X_{t+1} = k) for an integer step law.

    Bounds the probability that the walk's partial sums stay positive for
    t steps and end at k.
    """
    if t < 1 or k < 1:
        raise HypothesisError("ballot bound needs t >= 1 and k >= 1")
    if len(values) != len(probs):
        raise InfeasibleParametersError("values and probs differ in length")
    law: dict[int, object] = {}
    for x, px in zip(values, probs):
        law[int(x)] = law.get(int(x), 0) + px
    p_h = law.get(h, 0)
    if p_h <= 0:
        raise HypothesisError(f"step law gives P(X={h}) = 0")
    endpoint = _convolve_power(law, t + 1).get(k, 0)
    exact = all(isinstance(px, Rational) for px in law.values())
    factor = Fraction(k, t + 1) if exact else k / (t + 1)
    return factor * endpoint / p_h


def regular_step_pmf(N: int, value: int, d: int, p) -> float | Fraction:
    """
    P(xi_1 + ... + xi_N = value) with xi = (d-1) 1_R - 1, via the binomial:
    the sum equals (d-1) B_{N,p} - N.
    """
    b, rem = divmod(value + N, d - 1)
    if rem or not 0 <= b <= N:
        return Fraction(0) if isinstance(p, Rational) else 0.0
    if isinstance(p, Rational):
        p = Fraction(p)
        return math.comb(N, b) * p**b * (1 - p) ** (N - b)
    return float(stats.binom.pmf(b, N, p))


def ballot_bound_regular(t: int, k: int, d: int, p) -> float | Fraction:
    """
    d >= 4: (k+d-4) / (p^2 (t+2)) P(sum_{t+2} xi = k+d-4)
    d == 3: k / (p^3 (t+3)) P(sum_{t+3} xi = k)
    Unreachable endpoints give 0.
    """
    if d < 3:
        raise HypothesisError(f"regular ballot bound needs d >= 3, got {d}")
    if k < 1:
        raise HypothesisError("regular ballot bound needs k >= 1")
    if not 0 < p <= 1:
        raise HypothesisError("regular ballot bound needs 0 < p <= 1")
    if d >= 4:
        N, x, power = t + 2, k + d - 4, 2
    else:
        N, x, power = t + 3, k, 3
    endpoint = regular_step_pmf(N, x, d, p)
    if isinstance(p, Rational):
        return Fraction(x, N) * endpoint / Fraction(p) ** power
    return x / (p**power * N) * endpoint


def ballot_tail_sum(T: int, d: int, p, k_min: int) -> float | Fraction:
    """Sum of ballot_bound_regular(T, k) over k_min <= k <= d + T(d-2)."""
    k_min = max(1, int(k_min))
    total = Fraction(0) if isinstance(p, Rational) else 0.0
    for k in range(k_min, d + T * (d - 2) + 1):
        total += ballot_bound_regular(T, k, d, p)
    return total


# ---------------------------------------------------------------------------
# Binomial bounds
# ---------------------------------------------------------------------------


def binomial_point_bound(N: int, P: float, x: float) -> float:
    """
    Upper bound on P(Bin(N,P) = j) for every j >= PN + x, valid when
    PN >= 1 and x (1-P) N / 3 >= 1.
    """
    if not 0 < P < 1:
        raise HypothesisError("point bound needs 0 < P < 1")
    if P * N < 1:
        raise HypothesisError(f"point bound needs PN >= 1 (PN = {P * N})")
    if x * (1 - P) * N / 3 < 1:
        raise HypothesisError("point bound needs x (1-P) N / 3 >= 1")
    var = P * (1 - P) * N
    exponent = -(x * x) / (2 * var) + x / ((1 - P) * N) + x**3 / (P * P * N * N)
    return math.exp(exponent) / math.sqrt(2 * math.pi * var)


def chernoff_bound(N: int, P: float, x: float) -> float:
    """exp(-x^2 / (2 (NP + x/3))) bounds P(Bin(N,P) >= NP + x) for x >= 0."""
    if x < 0:
        raise HypothesisError("Chernoff bound needs x >= 0")
    scale = 2 * (N * P + x / 3)
    if scale == 0:
        return 1.0
    return math.exp(-(x * x) / scale)


# ---------------------------------------------------------------------------
# Exponential tilts
# ---------------------------------------------------------------------------


def tilt_nu(T_prime: float, n: int, p: float, d: int) -> float:
    """(d-1)^{-1} [log(1 - p(1-T'/n)) - log((d-2) p (1-T'/n))]."""
    if d < 3:
        raise HypothesisError(f"tilt needs d >= 3, got {d}")
    q = p * (1 - T_prime / n)
    a, b = 1 - q, (d - 2) * q
    if a <= 0 or b <= 0:
        raise HypothesisError("tilt log arguments must be positive")
    return (math.log(a) - math.log(b)) / (d - 1)


def tilt_gamma(p: float, d: int) -> float:
    """(d-1)^{-1} log((1-p) / (p(d-2)))."""
    if d < 3:
        raise HypothesisError(f"tilt needs d >= 3, got {d}")
    if not 0 < p < 1:
        raise HypothesisError("tilt log arguments must be positive")
    return math.log((1 - p) / (p * (d - 2))) / (d - 1)
