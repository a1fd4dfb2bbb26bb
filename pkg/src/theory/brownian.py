"""
Brownian barrier quantities for the lower-bound argument.

PURPOSE:
    The reflection density of Brownian motion killed at a linear barrier, and
    the geometry (convex curve phi, its two chords, target intervals) inside
    which the rescaled exploration walk is asked to stay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy import integrate

from src.errors import HypothesisError
from src.theory.horizons import default_short_horizon, t_lower


def reflection_density(x: float, y: float, mu: float, t: float, z: float) -> float:
    """
    Density at z of B_t for B started at x and killed on first touching the
    line y + mu s:
        (2 pi t)^{-1/2} exp(-(z-x)^2 / 2t) (1 - exp(2 (x-y)(mu t + y - z) / t)).
    Zero on the boundary x = y or z = y + mu t.
    """
    if t <= 0:
        raise HypothesisError("reflection density needs t > 0")
    if x < y:
        raise HypothesisError(f"start {x} lies below the barrier {y}")
    if z < y + mu * t:
        raise HypothesisError(f"endpoint {z} lies below the barrier {y + mu * t}")
    gauss = math.exp(-((z - x) ** 2) / (2 * t)) / math.sqrt(2 * math.pi * t)
    return gauss * -math.expm1(2 * (x - y) * (mu * t + y - z) / t)


def reflection_mass(
    x: float, y: float, mu: float, t: float, z_lo: float, z_hi: float = math.inf
) -> float:
    """P_x(B stays above y + mu s on [0,t], B_t in [z_lo, z_hi])."""
    lo = max(z_lo, y + mu * t)
    if z_hi <= lo:
        return 0.0
    value, _ = integrate.quad(lambda z: reflection_density(x, y, mu, t, z), lo, z_hi)
    return value


@dataclass(frozen=True)
class BrownianGeometry:
    A: float
    n: int
    d: int
    epsilon: float
    lam: float
    T: int
    T_prime: int
    T_second: int
    f: Callable[[float], float]
    phi: Callable[[float], float]
    slope1: float
    slope2: float
    I1: tuple[float, float]
    I2: tuple[float, float]
    Phi: float

    def ell1(self, s: float) -> float:
        """Chord of phi over [0, T''/2]."""
        return self.phi(0.0) + self.slope1 * s

    def ell2(self, s: float) -> float:
        """Chord of phi over [T''/2, T''], with s measured from T''/2."""
        return self.phi(self.T_second / 2) + self.slope2 * s


def brownian_geometry(
    A: float, n: int, d: int, epsilon: float, lam: float = 0.0
) -> BrownianGeometry:
    """
    T = floor((d-1) A n^{2/3}) + 1, T' = floor(n^{2/3}/A^2), T'' = T - T'.
        f(t)   = (d-2)/(d(d-1)) (t^2 + 2 t T')/(2n) - eps n^{1/3}/(2A)
        phi(t) = f(t)/sqrt(d-2) + eps n^{1/3}/(4A sqrt(d-2))
        I1 = [phi(T'')/2 + n^{1/3}/(8A) - A^{1/2} n^{1/3}, phi(T'')/2 + n^{1/3}/(8A)]
        I2 = [phi(T'') + n^{1/3}/(8A), phi(T'') + n^{1/3}/(4A)]
        Phi = phi(T'') + n^{1/3}/(4A)
    """
    if A <= 0 or epsilon <= 0:
        raise HypothesisError("geometry needs A > 0 and epsilon > 0")
    if d < 3:
        raise HypothesisError(f"geometry needs d >= 3, got {d}")
    T = t_lower(A, n, d)
    T_prime = default_short_horizon(A, n)
    T_second = T - T_prime
    if T_second <= 0:
        raise HypothesisError(f"T'' = {T_second} must be positive")

    cube = n ** (1.0 / 3.0)
    root = math.sqrt(d - 2)
    curvature = (d - 2) / (d * (d - 1))

    def f(t: float) -> float:
        return curvature * (t * t + 2 * t * T_prime) / (2 * n) - epsilon * cube / (2 * A)

    def phi(t: float) -> float:
        return f(t) / root + epsilon * cube / (4 * A * root)

    half = T_second / 2
    slope1 = (phi(half) - phi(0.0)) / half
    slope2 = (phi(T_second) - phi(half)) / half
    end = phi(T_second)
    I1 = (end / 2 + cube / (8 * A) - math.sqrt(A) * cube, end / 2 + cube / (8 * A))
    I2 = (end + cube / (8 * A), end + cube / (4 * A))
    return BrownianGeometry(
        A=A,
        n=n,
        d=d,
        epsilon=epsilon,
        lam=lam,
        T=T,
        T_prime=T_prime,
        T_second=T_second,
        f=f,
        phi=phi,
        slope1=slope1,
        slope2=slope2,
        I1=I1,
        I2=I2,
        Phi=end + cube / (4 * A),
    )


def two_line_probability(geometry: BrownianGeometry) -> float:
    """
    P_0(B above ell1 on [0, T''/2], B_{T''/2} in I1, then above ell2 on the
    second half, B_{T''} in I2), by integrating the reflection density twice.
    """
    half = geometry.T_second / 2
    y1 = geometry.phi(0.0)
    y2 = geometry.phi(half)

    def first_leg(w: float) -> float:
        if w <= y1 + geometry.slope1 * half:
            return 0.0
        return reflection_density(0.0, y1, geometry.slope1, half, w)

    def second_leg(w: float) -> float:
        if w <= y2:
            return 0.0
        return reflection_mass(w, y2, geometry.slope2, half, *geometry.I2)

    value, _ = integrate.quad(
        lambda w: first_leg(w) * second_leg(w), geometry.I1[0], geometry.I1[1]
    )
    return value
