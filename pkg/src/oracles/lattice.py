"""
Exact stay-above-barrier probabilities for integer random walks.

The forward DP tracks the law of the walk's level restricted to paths that
have stayed strictly above the barrier so far. With rational step
probabilities and t <= EXACT_MAX_HORIZON the arithmetic is exact; beyond
that, or with float probabilities, it runs in floats and says so.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Mapping, Sequence

from src.config import settings
from src.errors import OracleSizeError

logger = logging.getLogger("regulus")

ANY = None  # end_at value meaning "any endpoint"

MAX_ENUMERATION_HORIZON = 12


@dataclass(frozen=True)
class OracleValue:
    value: Fraction | float
    exact: bool

    def __float__(self) -> float:
        return float(self.value)


StepLaw = Mapping[int, object] | Sequence[tuple[int, object]]
Barrier = float | Callable[[int], float]


def _normalize_law(step_law: StepLaw, exact: bool) -> dict[int, object]:
    items = step_law.items() if isinstance(step_law, Mapping) else step_law
    law: dict[int, object] = {}
    for x, px in items:
        px = Fraction(px) if exact else float(px)
        if px:
            law[int(x)] = law.get(int(x), 0) + px
    return law


def _is_rational_law(step_law: StepLaw) -> bool:
    items = step_law.items() if isinstance(step_law, Mapping) else step_law
    return all(isinstance(px, Rational) for _, px in items)


def _barrier_fn(barrier: Barrier) -> Callable[[int], float]:
    return barrier if callable(barrier) else (lambda j, b=barrier: b)


def walk_stay_positive_exact(
    t: int,
    start: int,
    step_law: StepLaw,
    end_at: int | None = ANY,
    barrier: Barrier = 0,
) -> OracleValue:
    """
    P(start + S_j > barrier(j) for j = 1..t [and start + S_t = end_at]),
    zero when start does not lie strictly above barrier(0).
    """
    if t < 0:
        raise ValueError("horizon must be non-negative")
    exact = _is_rational_law(step_law) and t <= settings.EXACT_MAX_HORIZON
    if _is_rational_law(step_law) and not exact:
        logger.warning(
            f"horizon {t} exceeds {settings.EXACT_MAX_HORIZON}; lattice DP runs in floats"
        )
    law = _normalize_law(step_law, exact)
    above = _barrier_fn(barrier)
    zero = Fraction(0) if exact else 0.0

    if not start > above(0):
        return OracleValue(zero, exact)

    levels: dict[int, object] = {start: Fraction(1) if exact else 1.0}
    for j in range(1, t + 1):
        floor = above(j)
        nxt: dict[int, object] = {}
        for level, mass in levels.items():
            for x, px in law.items():
                y = level + x
                if y > floor:
                    nxt[y] = nxt.get(y, zero) + mass * px
        levels = nxt
        if not levels:
            break

    if end_at is ANY:
        total = sum(levels.values(), zero)
    else:
        total = levels.get(end_at, zero)
    return OracleValue(total, exact)


def walk_stay_positive_enumerate(
    t: int,
    start: int,
    step_law: StepLaw,
    end_at: int | None = ANY,
    barrier: Barrier = 0,
) -> Fraction | float:
    """Same probability by listing every path; for cross-checking the DP."""
    if t > MAX_ENUMERATION_HORIZON:
        raise OracleSizeError(f"path enumeration capped at t={MAX_ENUMERATION_HORIZON}")
    exact = _is_rational_law(step_law)
    law = _normalize_law(step_law, exact)
    above = _barrier_fn(barrier)
    total = Fraction(0) if exact else 0.0
    if not start > above(0):
        return total
    for path in itertools.product(law.items(), repeat=t):
        level = start
        weight = Fraction(1) if exact else 1.0
        for j, (x, px) in enumerate(path, start=1):
            level += x
            weight *= px
            if level <= above(j):
                break
        else:
            if end_at is ANY or level == end_at:
                total += weight
    return total
