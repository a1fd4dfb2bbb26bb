"""
Comparison walks evaluated pathwise on an exploration trace.

PURPOSE:
    The upper and lower bounds on component sizes compare the active-stub walk
    (increments eta) with simpler walks. Each comparison walk here is a
    deterministic function of quantities the trace already holds (retention
    R_i, the class of h_i, active hits) plus auxiliary uniforms U_i. Because
    all series share these inputs, the orderings between them are per-path
    facts that can be asserted, not distributional claims.

KINDS (1_R retention, 1_A active hit, 1_U unseen hit, 1_F fresh, 1_F' d-1 unseen):
    ETA              1_U 1_R (m-1) - 1_A - 1
    ETA_PRIME        1_R (d-2) + 1_R 1_F - 1
    MU               1_R (d-2) + 1_R 1{U <= x_i} - 1
    MU_PRIME         1_R 1{U > x_i}
    XI, D            (d-1) 1_R - 1
    DELTA            1_R 1_F (d-1) + 1_R 1_F' (d-2) - 1_A - 1
    DELTA_PRIME      1_R 1_F (d-1) - 1_A - 1
    DELTA_2PRIME     1_R 1_F (d-1) - 1
    DELTA_CAP_2PRIME 1_R 1{U <= 1 - T'/n} (d-1) - 1
    D_2PRIME         1{U <= 1/(d-1)} (d-1) - 1
    D_PRIME          D_2PRIME / sqrt(d-2)
    with x_i = d (a_n(i-1) + m) / (dn - 2(i-1) - 1).

DESIGN:
    Class-based kinds exist only up to tau (they describe phase one).
    R/U kinds use the trace's R column, then i.i.d. extra retention flags
    held by AuxRandomness, so they can run past the end of the trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.errors import HorizonError
from src.exploration.process import ExplorationTrace, HitClass
from src.schemas import CheckReport, Violation
from src.shared.streams import RandomStream
from src.theory.horizons import default_fresh_slack, default_short_horizon


class SeriesKind(str, Enum):
    ETA = "eta"
    ETA_PRIME = "eta_prime"
    MU = "mu"
    MU_PRIME = "mu_prime"
    XI = "xi"
    DELTA = "delta"
    DELTA_PRIME = "delta_prime"
    DELTA_2PRIME = "delta_2prime"
    DELTA_CAP_2PRIME = "delta_cap_2prime"
    D = "D"
    D_PRIME = "D_prime"
    D_2PRIME = "D_2prime"


CLASS_BASED = frozenset(
    {
        SeriesKind.ETA,
        SeriesKind.ETA_PRIME,
        SeriesKind.DELTA,
        SeriesKind.DELTA_PRIME,
        SeriesKind.DELTA_2PRIME,
    }
)
NEEDS_UNIFORMS = frozenset(
    {
        SeriesKind.MU,
        SeriesKind.MU_PRIME,
        SeriesKind.DELTA_CAP_2PRIME,
        SeriesKind.D_PRIME,
        SeriesKind.D_2PRIME,
    }
)


def a_n(i: float, n: int) -> float:
    """n - 1 - i + i^2 / (2n)."""
    if i < 0:
        raise ValueError("a_n needs i >= 0")
    return n - 1 - i + i * i / (2.0 * n)


@dataclass(frozen=True)
class AuxRandomness:
    """U_i ~ U[0,1) i.i.d. and retention flags for steps past the trace."""

    uniforms: np.ndarray
    extra_retained: np.ndarray
    m: float
    t_prime: int

    @property
    def horizon(self) -> int:
        return len(self.uniforms)


def make_aux(
    trace: ExplorationTrace,
    horizon: int,
    stream: RandomStream,
    p: float | None = None,
    m: float | None = None,
    t_prime: int | None = None,
    A: float | None = None,
) -> AuxRandomness:
    """
    Draw auxiliary randomness covering `horizon` steps.

    m and T' default to A n^{4/15} and floor(n^{2/3}/A^2) when A is given.
    """
    p = trace.p if p is None else p
    if p is None:
        raise ValueError("retention probability unknown; pass p")
    if m is None or t_prime is None:
        if A is None:
            raise ValueError("pass m and t_prime, or A to derive them")
        m = default_fresh_slack(A, trace.n) if m is None else m
        t_prime = default_short_horizon(A, trace.n) if t_prime is None else t_prime
    uniforms = stream.uniforms(horizon)
    extra = stream.bernoulli(p, max(0, horizon - trace.steps))
    return AuxRandomness(uniforms=uniforms, extra_retained=extra, m=m, t_prime=t_prime)


@dataclass(frozen=True)
class IncrementSeries:
    kind: SeriesKind
    values: np.ndarray
    horizon: int
    d: int

    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.values)


def _retention(trace: ExplorationTrace, aux: AuxRandomness | None, horizon: int):
    available = trace.steps + (0 if aux is None else len(aux.extra_retained))
    if horizon > available:
        raise HorizonError(f"horizon {horizon} exceeds {available} retention flags")
    r = trace.retained[:horizon]
    if horizon > trace.steps:
        r = np.concatenate([r, aux.extra_retained[: horizon - trace.steps]])
    return r.astype(np.int64)


def fresh_thresholds(n: int, d: int, m: float, horizon: int) -> np.ndarray:
    """x_i = d (a_n(i-1) + m) / (dn - 2(i-1) - 1) for i = 1..horizon."""
    j = np.arange(horizon, dtype=float)  # j = i - 1
    a = n - 1 - j + j * j / (2.0 * n)
    return d * (a + m) / (d * n - 2 * j - 1)


def series(
    trace: ExplorationTrace,
    kind: SeriesKind,
    aux: AuxRandomness | None = None,
    horizon: int | None = None,
) -> IncrementSeries:
    """Evaluate one comparison walk's increments over steps 1..horizon."""
    kind = SeriesKind(kind)
    n, d = trace.n, trace.d

    if kind in NEEDS_UNIFORMS and aux is None:
        raise ValueError(f"{kind.value} needs auxiliary uniforms")

    if horizon is None:
        if kind in CLASS_BASED:
            horizon = trace.phase_one_steps
        elif aux is not None:
            horizon = aux.horizon
        else:
            horizon = trace.steps
    if kind in CLASS_BASED and horizon > trace.phase_one_steps:
        raise HorizonError(
            f"{kind.value} is defined up to tau={trace.phase_one_steps}, asked {horizon}"
        )
    if kind in NEEDS_UNIFORMS and horizon > aux.horizon:
        raise HorizonError(f"aux covers {aux.horizon} steps, asked {horizon}")

    if kind in CLASS_BASED:
        cls = trace.hit_class[:horizon]
        r = trace.retained[:horizon].astype(np.int64)
        hit_a = (cls == HitClass.ACTIVE).astype(np.int64)
        hit_u = 1 - hit_a
        fresh = (cls == HitClass.UNSEEN_FRESH).astype(np.int64)
        full = (cls == HitClass.UNSEEN_FULL).astype(np.int64)
        m = trace.unseen_before[:horizon].astype(np.int64)
        if kind is SeriesKind.ETA:
            values = hit_u * r * (m - 1) - hit_a - 1
        elif kind is SeriesKind.ETA_PRIME:
            values = r * (d - 2) + r * fresh - 1
        elif kind is SeriesKind.DELTA:
            values = r * fresh * (d - 1) + r * full * (d - 2) - hit_a - 1
        elif kind is SeriesKind.DELTA_PRIME:
            values = r * fresh * (d - 1) - hit_a - 1
        else:
            values = r * fresh * (d - 1) - 1
        return IncrementSeries(kind, values, horizon, d)

    if kind in (SeriesKind.D_2PRIME, SeriesKind.D_PRIME):
        u = aux.uniforms[:horizon]
        values = (u <= 1.0 / (d - 1)).astype(np.int64) * (d - 1) - 1
        if kind is SeriesKind.D_PRIME:
            values = values / math.sqrt(d - 2)
        return IncrementSeries(kind, values, horizon, d)

    r = _retention(trace, aux, horizon)
    if kind in (SeriesKind.XI, SeriesKind.D):
        values = (d - 1) * r - 1
    elif kind is SeriesKind.DELTA_CAP_2PRIME:
        below = (aux.uniforms[:horizon] <= 1.0 - aux.t_prime / n).astype(np.int64)
        values = r * below * (d - 1) - 1
    else:
        x = fresh_thresholds(n, d, aux.m, horizon)
        below = (aux.uniforms[:horizon] <= x).astype(np.int64)
        if kind is SeriesKind.MU:
            values = r * (d - 2) + r * below - 1
        else:
            values = r * (1 - below)
    return IncrementSeries(kind, values, horizon, d)


def first_hit(values: IncrementSeries | np.ndarray, start: float | None = None):
    """Smallest t >= 1 with start + sum_{i<=t} values_i <= 0, or math.inf."""
    if isinstance(values, IncrementSeries):
        start = values.d if start is None else start
        values = values.values
    if start is None:
        raise ValueError("start level required for a bare array")
    level = start + np.cumsum(values)
    hits = np.flatnonzero(level <= 0)
    return int(hits[0]) + 1 if len(hits) else math.inf


def check_coupling(trace: ExplorationTrace, aux: AuxRandomness) -> CheckReport:
    """
    Over phase one, per step:
        delta' <= delta <= eta <= eta' <= xi,  xi = mu + mu',  mu' in {0,1},
        D >= delta,  delta'' >= delta',  D' two-valued,
    and first_hit(delta') <= first_hit(delta) <= first_hit(eta) = tau.
    """
    tau = trace.phase_one_steps
    if aux.horizon < tau:
        raise HorizonError(f"aux covers {aux.horizon} steps, phase one has {tau}")

    s = {kind: series(trace, kind, aux, tau).values for kind in SeriesKind}
    violations: list[Violation] = []
    checks = 0

    def pathwise(name: str, ok: np.ndarray):
        nonlocal checks
        checks += 1
        bad = np.flatnonzero(~ok)
        if len(bad):
            violations.append(Violation(check=name, step=int(bad[0]) + 1))

    K = SeriesKind
    pathwise("delta'<=delta", s[K.DELTA_PRIME] <= s[K.DELTA])
    pathwise("delta<=eta", s[K.DELTA] <= s[K.ETA])
    pathwise("eta<=eta'", s[K.ETA] <= s[K.ETA_PRIME])
    pathwise("eta'<=xi", s[K.ETA_PRIME] <= s[K.XI])
    pathwise("xi=mu+mu'", s[K.XI] == s[K.MU] + s[K.MU_PRIME])
    pathwise("mu'-binary", (s[K.MU_PRIME] == 0) | (s[K.MU_PRIME] == 1))
    pathwise("D>=delta", s[K.D] >= s[K.DELTA])
    pathwise("delta''>=delta'", s[K.DELTA_2PRIME] >= s[K.DELTA_PRIME])
    root = math.sqrt(trace.d - 2)
    pathwise(
        "D'-support",
        np.isclose(s[K.D_PRIME], -1.0 / root) | np.isclose(s[K.D_PRIME], root),
    )

    if trace.phases[0].complete:
        d = trace.d
        hits = [first_hit(s[k], d) for k in (K.DELTA_PRIME, K.DELTA, K.ETA)]
        checks += 1
        if not (hits[0] <= hits[1] <= hits[2] == tau):
            violations.append(
                Violation(check="first-hit-order", step=tau, detail=f"{hits} vs tau={tau}")
            )

    return CheckReport(
        name="coupling", passed=not violations, checks=checks, violations=violations
    )
