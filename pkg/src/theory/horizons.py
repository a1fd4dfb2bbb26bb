"""Horizon constants and default tunables shared by the bounds, walks and audits."""

from __future__ import annotations

import math


def t_upper(A: float, n: int, d: int) -> int:
    """Horizon of the upper-bound argument: floor((d-1) A n^{2/3}) - ceil(n^{1/2}) - 1."""
    return math.floor((d - 1) * A * n ** (2.0 / 3.0)) - math.ceil(math.sqrt(n)) - 1


def t_lower(A: float, n: int, d: int) -> int:
    """Horizon of the lower-bound argument: floor((d-1) A n^{2/3}) + 1."""
    return math.floor((d - 1) * A * n ** (2.0 / 3.0)) + 1


def default_fresh_slack(A: float, n: int) -> float:
    """m = A n^{4/15}, the slack allowed to the fresh-vertex count."""
    return A * n ** (4.0 / 15.0)


def default_short_horizon(A: float, n: int) -> int:
    """T' = floor(n^{2/3} / A^2)."""
    return math.floor(n ** (2.0 / 3.0) / A**2)


def x_offset(k: float, lam: float, T: int, d: int, n: int) -> float:
    """
    Offset x with (T+2) p + x = (T + 2 + k + d - 4)/(d-1) at p = (1 + lam n^{-1/3})/(d-1):
    x = (k + d - 4 - lam (T+2) n^{-1/3}) / (d-1).
    """
    return (k + d - 4 - lam * (T + 2) * n ** (-1.0 / 3.0)) / (d - 1)
