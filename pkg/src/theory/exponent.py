"""
Tail exponent G_lambda(A, d) and the envelopes it defines.

Two published forms differ in the lambda A^2 coefficient:
    THEOREM11: (d-1)/(2d)
    ABSTRACT:  (d-2)^2 / (2d(d-1))
They coincide at lambda = 0. THEOREM11 is the default.
"""

from __future__ import annotations

import math
from enum import Enum

from src.errors import HypothesisError


class ExponentVariant(str, Enum):
    THEOREM11 = "theorem11"
    ABSTRACT = "abstract"


class EnvelopeMode(str, Enum):
    VERTEX = "vertex"
    MAX = "max"


def g_exponent(
    A: float, lam: float, d: int, variant: ExponentVariant = ExponentVariant.THEOREM11
) -> float:
    """A^3 (d-1)(d-2)/(8d^2) - [lambda A^2 term] + lambda^2 A (d-1)/(2(d-2))."""
    if d < 3:
        raise HypothesisError(f"exponent needs d >= 3, got {d}")
    if A < 0:
        raise HypothesisError(f"exponent needs A >= 0, got {A}")
    variant = ExponentVariant(variant)
    if variant is ExponentVariant.THEOREM11:
        linear = lam * A**2 * (d - 1) / (2 * d)
    else:
        linear = lam * A**2 * (d - 2) ** 2 / (2 * d * (d - 1))
    return (
        A**3 * (d - 1) * (d - 2) / (8 * d * d)
        - linear
        + lam**2 * A * (d - 1) / (2 * (d - 2))
    )


def envelope(
    A: float,
    n: int,
    d: int,
    lam: float,
    mode: EnvelopeMode,
    c: float,
    variant: ExponentVariant = ExponentVariant.THEOREM11,
) -> float:
    """
    c A^{-1/2} n^{-1/3} e^{-G} for one vertex's component, c A^{-3/2} e^{-G}
    for the largest one. The constant c is the caller's: it is not known.
    """
    if c <= 0:
        raise HypothesisError("envelope constant must be positive")
    if A <= 0:
        raise HypothesisError("envelope needs A > 0")
    decay = math.exp(-g_exponent(A, lam, d, variant))
    if EnvelopeMode(mode) is EnvelopeMode.VERTEX:
        return c * A ** (-0.5) * n ** (-1.0 / 3.0) * decay
    return c * A ** (-1.5) * decay
