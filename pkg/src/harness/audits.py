"""
Event audits and auxiliary diagnostics.

PURPOSE:
    Each audit takes an exceedance event that the component-size arguments
    bound by a closed-form right-hand side, measures its frequency over
    traced explorations, and sets the two side by side.

DESIGN:
    Events are evaluated on phase one up to the audit horizon; the traced
    exploration is stopped there with max_steps. An audit is VACUOUS when its
    right-hand side is >= 1 at the chosen tunables, PASS when the frequency
    is at most RHS + 3 SE, FAIL otherwise. Right-hand sides are accumulated
    in log space (logsumexp).

    The diagnostics at the bottom (sandwich, second moment, barrier walk)
    reuse the same chunked runner.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from src.errors import HypothesisError, InfeasibleParametersError, UnknownAuditError
from src.exploration.checks import sandwich_check
from src.exploration.process import ExplorationTrace, HitClass, StopRule, explore
from src.graph.config_graph import components, sample_mask, sample_matching
from src.harness.runner import run_trials
from src.schemas import AuditReport, BarrierEstimate, Params, SandwichReport, SecondMomentReport
from src.shared.stats import proportion_interval, standard_error
from src.shared.streams import RandomStream
from src.theory.bounds import q_lower_curve, q_upper
from src.theory.brownian import reflection_mass
from src.theory.horizons import default_fresh_slack, default_short_horizon, t_lower, t_upper
from src.utils.metrics import AUDIT_OUTCOMES, EXPERIMENT_DURATION, TRIAL_SUCCESSES, TRIALS_TOTAL
from src.utils.tracing import set_run_attributes, tracer
from src.walks.coupled_walks import SeriesKind, first_hit, fresh_thresholds, make_aux, series

logger = logging.getLogger("regulus")

_AUX = 1  # child-stream tag for auxiliary uniforms
_LOG_CEILING = 700.0


@dataclass(frozen=True)
class AuditContext:
    """Resolved regime and tunables for one audit run."""

    n: int
    d: int
    p: float
    A: float
    T: int
    tunables: dict[str, float] = field(default_factory=dict)

    def __getitem__(self, key: str) -> float:
        return self.tunables[key]


@dataclass(frozen=True)
class AuditDefinition:
    name: str
    description: str
    horizon: str  # "upper" | "lower"
    defaults: Callable[[AuditContext], dict[str, float]]
    steps: Callable[[AuditContext], int]
    event: Callable[[ExplorationTrace, AuditContext, RandomStream], bool]
    log_rhs: Callable[[AuditContext], float]


def _window(trace: ExplorationTrace, limit: int) -> int:
    """Number of phase-one steps at or before `limit`."""
    return max(0, min(int(limit), trace.phase_one_steps))


def _default_r(ctx: AuditContext) -> float:
    return math.sqrt(ctx.n) / ctx.T


def _lse(terms: np.ndarray) -> float:
    if len(terms) == 0:
        return -math.inf
    return float(special.logsumexp(terms))


# ---------------------------------------------------------------------------
# fresh-excess: |V^(d)_i| > a_n(i) + m for some i <= T-1
# ---------------------------------------------------------------------------


def _fresh_excess_event(trace, ctx, stream) -> bool:
    k = _window(trace, ctx.T - 1)
    i = np.arange(1, k + 1)
    bound = ctx.n - 1 - i + i * i / (2.0 * ctx.n) + ctx["m"]
    return bool(np.any(trace.fresh_after[:k] > bound))


def _fresh_excess_rhs(ctx) -> float:
    n, d, r, m = ctx.n, ctx.d, ctx["r"], ctx["m"]
    i = np.arange(1, ctx.T, dtype=float)
    drift = np.cumsum(i / (d * n - 2 * (i - 1) - 1))
    return _lse(-r * (i * i / (2 * n) + m) + math.expm1(r) * d * drift)


# ---------------------------------------------------------------------------
# mu-prime-deficit: sum_{i<=T} mu'_i <= q_upper(T) - h
# ---------------------------------------------------------------------------


def _mu_prime_event(trace, ctx, stream) -> bool:
    aux = make_aux(
        trace, ctx.T, stream.child(_AUX), p=ctx.p, m=ctx["m"],
        t_prime=default_short_horizon(ctx.A, ctx.n),
    )
    total = series(trace, SeriesKind.MU_PRIME, aux, ctx.T).values.sum()
    return bool(total <= q_upper(ctx.T, ctx.p, ctx.d, ctx.n) - ctx["h"])


def _mu_prime_rhs(ctx) -> float:
    n, d, p, r, T = ctx.n, ctx.d, ctx.p, ctx["r"], ctx.T
    x = fresh_thresholds(n, d, ctx["m"], T)
    shortfall = p * np.maximum(0.0, 1.0 - x) * -math.expm1(-r)
    return -r * ctx["h"] + r * q_upper(T, p, d, n) + float(np.sum(np.log1p(-shortfall)))


# ---------------------------------------------------------------------------
# depleted-vertices: |V^(1..d-2)_i| > i^2/n + l for some i <= T-1
# ---------------------------------------------------------------------------


def _depleted_event(trace, ctx, stream) -> bool:
    k = _window(trace, ctx.T - 1)
    i = np.arange(1, k + 1)
    return bool(np.any(trace.depleted_after[:k] > i * i / ctx.n + ctx["l"]))


def _depleted_rhs(ctx) -> float:
    n, d, r = ctx.n, ctx.d, ctx["r"]
    i = np.arange(1, ctx.T, dtype=float)
    growth = np.log1p((d - 1) * i / (d * n - 2 * i - 1) * math.expm1(r))
    # product over j < i
    prefix = np.concatenate([[0.0], np.cumsum(growth)[:-1]])
    return _lse(-r * i * i / n - r * ctx["l"] + prefix)


# ---------------------------------------------------------------------------
# active-overflow: |A_i| > omega for some i <= t
# ---------------------------------------------------------------------------


def _active_steps(ctx) -> int:
    return int(ctx["t"])


def _active_event(trace, ctx, stream) -> bool:
    k = _window(trace, ctx["t"])
    return bool(np.any(trace.active_after[:k] > ctx["omega"]))


def _active_rhs(ctx) -> float:
    d, t, omega = ctx.d, ctx["t"], ctx["omega"]
    if omega > 3 * t / (d - 1):
        raise HypothesisError(f"omega = {omega} exceeds 3t/(d-1) = {3 * t / (d - 1)}")
    p_star = max(ctx.p, 1.0 / (d - 1))
    r = omega / (2 * p_star * (d - 1) * t)
    base = special.logsumexp([r * (d - 2), -r], b=[p_star, 1 - p_star])
    return t * float(base) - r * (omega - d)


# ---------------------------------------------------------------------------
# rare-steps: retained depleted hits plus active hits exceed their budget
# ---------------------------------------------------------------------------


def _rare_event(trace, ctx, stream) -> bool:
    k = _window(trace, ctx.T)
    cls = trace.hit_class[:k]
    rare = (trace.retained[:k] & (cls == HitClass.UNSEEN_DEPLETED)) | (cls == HitClass.ACTIVE)
    t = np.arange(1, k + 1)
    n, T, h = ctx.n, ctx.T, ctx["h"]
    budget = 4 * t**3 / (3 * ctx.d * n * n) + (8 * math.sqrt(T) * t / n + 1) * h
    return bool(np.any(np.cumsum(rare) > budget))


def _rare_rhs(ctx) -> float:
    h = ctx["h"]
    return float(
        special.logsumexp([math.log(ctx["C"] * ctx.T) - h, -ctx["c"] * h * h])
    )


# ---------------------------------------------------------------------------
# nonfresh-retained: retained non-fresh hits exceed x_t for some t <= T
# ---------------------------------------------------------------------------


def _nonfresh_budget(ctx, t: np.ndarray) -> np.ndarray:
    n, T = ctx.n, ctx.T
    return ctx.p * (1 - 2 / ctx.d) * t * t / (2 * n) + 2 * T**3 / n**2 + ctx["theta"]


def _nonfresh_event(trace, ctx, stream) -> bool:
    k = _window(trace, ctx.T)
    hits = trace.retained[:k] & (trace.hit_class[:k] != HitClass.UNSEEN_FRESH)
    t = np.arange(1, k + 1, dtype=float)
    return bool(np.any(np.cumsum(hits) > _nonfresh_budget(ctx, t)))


def _nonfresh_rhs(ctx) -> float:
    n, d, p, r = ctx.n, ctx.d, ctx.p, ctx["r"]
    i = np.arange(ctx.T, dtype=float)
    odds = 1 - d * (n - 1 - i) / (d * n - 2 * i - 1)
    # sum over i < t, t = 1..T
    prefix = np.concatenate([[0.0], np.cumsum(odds)[:-1]])
    t = np.arange(1, ctx.T + 1, dtype=float)
    return _lse(p * math.expm1(r) * prefix - r * _nonfresh_budget(ctx, t))


# ---------------------------------------------------------------------------
# drift-gap: sum (D_i - delta_i) > q_lower_curve(t) before delta hits zero
# ---------------------------------------------------------------------------


def _drift_event(trace, ctx, stream) -> bool:
    k = _window(trace, ctx.T)
    if k == 0:
        return False
    delta = series(trace, SeriesKind.DELTA, horizon=k)
    D = series(trace, SeriesKind.D, horizon=k)
    hit = first_hit(delta)
    k = k if hit == math.inf else min(k, hit)
    t = np.arange(1, k + 1, dtype=float)
    gap = np.cumsum(D.values[:k] - delta.values[:k])
    return bool(np.any(gap > q_lower_curve(t, ctx.p, ctx.d, ctx.n, ctx.A)))


def _drift_rhs(ctx) -> float:
    return math.log(ctx["C"] * ctx.T) - ctx["c"] * ctx.n ** 0.1


# ---------------------------------------------------------------------------
# irregular-hits: active or non-fresh hits among the first w steps
# ---------------------------------------------------------------------------


def _irregular_event(trace, ctx, stream) -> bool:
    k = _window(trace, ctx["w"])
    count = int(np.count_nonzero(trace.hit_class[:k] != HitClass.UNSEEN_FRESH))
    return count > 4 * ctx["w"] ** 2 / ctx.n


def _irregular_rhs(ctx) -> float:
    return -ctx["c"] * ctx["w"] ** 2 / ctx.n


AUDITS: dict[str, AuditDefinition] = {
    a.name: a
    for a in (
        AuditDefinition(
            "fresh-excess",
            "fresh vertices exceed a_n(i) + m",
            "upper",
            lambda c: {"m": default_fresh_slack(c.A, c.n), "r": _default_r(c)},
            lambda c: c.T,
            _fresh_excess_event,
            _fresh_excess_rhs,
        ),
        AuditDefinition(
            "mu-prime-deficit",
            "sum of mu' falls h below q_upper(T)",
            "upper",
            lambda c: {
                "m": default_fresh_slack(c.A, c.n),
                "h": math.sqrt(c.T),
                "r": _default_r(c),
            },
            lambda c: c.T,
            _mu_prime_event,
            _mu_prime_rhs,
        ),
        AuditDefinition(
            "depleted-vertices",
            "partly explored vertices exceed i^2/n + l",
            "lower",
            lambda c: {"l": math.sqrt(c.T), "r": min(1.0, _default_r(c))},
            lambda c: c.T,
            _depleted_event,
            _depleted_rhs,
        ),
        AuditDefinition(
            "active-overflow",
            "active stubs exceed omega by step t",
            "lower",
            lambda c: {"t": float(c.T), "omega": 3 * c.T / (c.d - 1)},
            _active_steps,
            _active_event,
            _active_rhs,
        ),
        AuditDefinition(
            "rare-steps",
            "retained depleted hits plus active hits exceed their budget",
            "lower",
            lambda c: {"h": c.T**0.25, "C": 1.0, "c": 1.0},
            lambda c: c.T,
            _rare_event,
            _rare_rhs,
        ),
        AuditDefinition(
            "nonfresh-retained",
            "retained non-fresh hits exceed x_t",
            "lower",
            lambda c: {"theta": math.sqrt(c.T), "r": _default_r(c)},
            lambda c: c.T,
            _nonfresh_event,
            _nonfresh_rhs,
        ),
        AuditDefinition(
            "drift-gap",
            "sum of D - delta exceeds the lower q-curve",
            "lower",
            lambda c: {"C": 1.0, "c": 1.0},
            lambda c: c.T,
            _drift_event,
            _drift_rhs,
        ),
        AuditDefinition(
            "irregular-hits",
            "active or non-fresh hits among the first w steps exceed 4w^2/n",
            "lower",
            lambda c: {"w": float(c.T), "c": 1.0},
            lambda c: int(c["w"]),
            _irregular_event,
            _irregular_rhs,
        ),
    )
}


def resolve_context(audit_id: str, params: Params, tunables: dict[str, float] | None) -> AuditContext:
    """Fill the audit's default tunables around the caller's overrides."""
    if audit_id not in AUDITS:
        raise UnknownAuditError(f"unknown audit {audit_id!r}; known: {', '.join(AUDITS)}")
    audit = AUDITS[audit_id]
    tunables = dict(tunables or {})
    A = params.A if params.A is not None else 1.0
    if "horizon" in tunables:
        T = int(tunables.pop("horizon"))
    elif audit.horizon == "upper":
        T = t_upper(A, params.n, params.d)
    else:
        T = t_lower(A, params.n, params.d)
    if T < 1:
        raise InfeasibleParametersError(f"audit horizon {T} < 1 for n={params.n}")
    base = AuditContext(n=params.n, d=params.d, p=params.p, A=A, T=T)
    merged = {**audit.defaults(base), **tunables}
    unknown = set(tunables) - set(audit.defaults(base))
    if unknown:
        raise InfeasibleParametersError(
            f"audit {audit_id} takes no tunable(s) {sorted(unknown)}"
        )
    return AuditContext(n=params.n, d=params.d, p=params.p, A=A, T=T, tunables=merged)


@dataclass(frozen=True)
class _AuditJob:
    audit_id: str
    params: Params
    ctx: AuditContext
    seed: int


def audit_trial(job: _AuditJob, index: int) -> bool:
    audit = AUDITS[job.audit_id]
    stream = RandomStream(job.seed, index)
    trace = explore(
        job.params,
        stop=StopRule.FIRST_COMPONENT,
        stream=stream,
        max_steps=max(1, audit.steps(job.ctx)),
    )
    return audit.event(trace, job.ctx, stream)


def _audit_chunk(job: _AuditJob, lo: int, hi: int) -> tuple[int]:
    return (sum(audit_trial(job, i) for i in range(lo, hi)),)


def lemma_audit(
    audit_id: str,
    params: Params,
    trials: int,
    tunables: dict[str, float] | None = None,
    seed: int = 0,
    threads: int | None = None,
) -> AuditReport:
    """Empirical frequency of one exceedance event next to its bound."""
    if trials < 1:
        raise InfeasibleParametersError("trials must be >= 1")
    ctx = resolve_context(audit_id, params, tunables)
    audit = AUDITS[audit_id]
    log_rhs = audit.log_rhs(ctx)
    rhs = math.exp(min(log_rhs, _LOG_CEILING))

    with tracer.start_as_current_span("lemma_audit") as span:
        set_run_attributes(span, audit=audit_id, n=params.n, d=params.d, horizon=ctx.T, trials=trials, seed=seed)
        started = time.perf_counter()
        (exceedances,) = run_trials(
            _audit_chunk, _AuditJob(audit_id, params, ctx, seed), trials, threads
        )
        elapsed = time.perf_counter() - started

    freq = exceedances / trials
    se = standard_error(freq, trials)
    if rhs >= 1:
        status = "VACUOUS"
    elif freq <= rhs + 3 * se:
        status = "PASS"
    else:
        status = "FAIL"

    TRIALS_TOTAL.labels(experiment="audit").inc(trials)
    TRIAL_SUCCESSES.labels(experiment="audit").inc(exceedances)
    EXPERIMENT_DURATION.labels(experiment="audit").observe(elapsed)
    AUDIT_OUTCOMES.labels(audit=audit_id, status=status).inc()
    logger.info(
        f"audit {audit_id}: {exceedances}/{trials} exceedances, rhs={rhs:.6g} -> {status}"
    )
    return AuditReport(
        audit=audit_id,
        status=status,
        trials=trials,
        exceedances=exceedances,
        frequency=freq,
        standard_error=se,
        rhs=rhs,
        horizon=ctx.T,
        tunables=ctx.tunables,
        seed=seed,
        elapsed_s=elapsed,
    )


# ---------------------------------------------------------------------------
# Sandwich diagnostic
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _SandwichJob:
    params: Params
    k: int
    seed: int


def _sandwich_chunk(job: _SandwichJob, lo: int, hi: int) -> tuple[int, int, int, int]:
    d, k = job.params.d, job.k
    lower = middle = upper = broken = 0
    for i in range(lo, hi):
        trace = explore(job.params, stream=RandomStream(job.seed, i))
        tau = trace.tau
        lower += tau > (d - 1) * (k + 1)
        middle += trace.phases[0].size > k
        upper += tau >= (d - 1) * k - math.sqrt(job.params.n)
        broken += not sandwich_check(trace, k)
    return lower, middle, upper, broken


def sandwich_diagnostic(
    params: Params, k: int, trials: int, seed: int, threads: int | None = None
) -> SandwichReport:
    """
    Estimates of P(tau > (d-1)(k+1)) <= P(|C(v)| > k) <= 2 P(tau >= (d-1)k - n^{1/2}).
    The left inequality is also checked on every path.
    """
    if trials < 1 or k < 0:
        raise InfeasibleParametersError("need trials >= 1 and k >= 0")
    with tracer.start_as_current_span("sandwich_diagnostic"):
        lower, middle, upper, broken = run_trials(
            _sandwich_chunk, _SandwichJob(params, k, seed), trials, threads
        )
    TRIALS_TOTAL.labels(experiment="sandwich").inc(trials)
    if broken:
        logger.error(f"sandwich implication failed on {broken} paths")
    mid = middle / trials
    up = 2 * upper / trials
    return SandwichReport(
        k=k,
        trials=trials,
        lower=lower / trials,
        middle=mid,
        upper=up,
        pathwise_ok=broken == 0,
        middle_below_upper=mid <= up,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Second-moment diagnostic
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _MomentJob:
    params: Params
    T: int
    seed: int


def _moment_chunk(job: _MomentJob, lo: int, hi: int) -> tuple[int, int, int]:
    sum_x = sum_x2 = hits = 0
    for i in range(lo, hi):
        stream = RandomStream(job.seed, i)
        graph = sample_mask(sample_matching(job.params, stream.child(0)), job.params.p, stream.child(1))
        sizes = components(graph).sizes
        x = sum(s for s in sizes if job.T <= s <= 2 * job.T)
        sum_x += x
        sum_x2 += x * x
        hits += sizes[0] >= job.T
    return sum_x, sum_x2, hits


def second_moment_diagnostic(
    params: Params, trials: int, seed: int, threads: int | None = None
) -> SecondMomentReport:
    """
    With T = ceil(A n^{2/3}) and X the number of vertices in components of
    size in [T, 2T], compares P(|C_max| >= T) with E[X]^2 / E[X^2].
    """
    if params.A is None:
        raise InfeasibleParametersError("second-moment diagnostic needs A")
    if trials < 1:
        raise InfeasibleParametersError("trials must be >= 1")
    T = math.ceil(params.A * params.n ** (2.0 / 3.0))
    with tracer.start_as_current_span("second_moment_diagnostic"):
        sum_x, sum_x2, hits = run_trials(
            _moment_chunk, _MomentJob(params, T, seed), trials, threads
        )
    TRIALS_TOTAL.labels(experiment="second_moment").inc(trials)
    TRIAL_SUCCESSES.labels(experiment="second_moment").inc(hits)
    mean_x, mean_x2 = sum_x / trials, sum_x2 / trials
    ratio = mean_x**2 / mean_x2 if mean_x2 else 0.0
    lo, hi = proportion_interval(hits, trials)
    return SecondMomentReport(
        horizon=T,
        trials=trials,
        mean_x=mean_x,
        mean_x2=mean_x2,
        ratio=ratio,
        p_hat=hits / trials,
        ci_lo=lo,
        ci_hi=hi,
        consistent=hi >= ratio,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Barrier walk
# ---------------------------------------------------------------------------

_BLOCK = 50_000


def barrier_walk_probability(
    x: float,
    y: float,
    mu: float,
    t: float,
    z_lo: float,
    z_hi: float = math.inf,
    paths: int = 100_000,
    steps: int = 100,
    seed: int = 0,
) -> BarrierEstimate:
    """
    Monte Carlo estimate of P_x(B_s > y + mu s for s <= t, B_t in [z_lo, z_hi]).

    Gaussian increments on a grid of `steps` intervals; each interval
    survives the barrier with the bridge probability 1 - exp(-2 a b / dt),
    a and b the distances to the line at its ends. Since the barrier is
    linear the weighting is exact and the estimator unbiased.
    """
    if t <= 0 or paths < 2 or steps < 1:
        raise InfeasibleParametersError("need t > 0, paths >= 2 and steps >= 1")
    dt = t / steps
    grid = np.arange(1, steps + 1) * dt
    line = y + mu * grid
    total = total_sq = 0.0
    for block, lo in enumerate(range(0, paths, _BLOCK)):
        size = min(_BLOCK, paths - lo)
        u = RandomStream(seed, block).uniforms(size * steps).reshape(size, steps)
        noise = special.ndtri(np.clip(u, 1e-300, None)) * math.sqrt(dt)
        level = x + np.cumsum(noise, axis=1)
        gap_after = level - line
        gap_before = np.concatenate(
            [np.full((size, 1), x - y), gap_after[:, :-1]], axis=1
        )
        alive = (gap_before > 0) & (gap_after > 0)
        survive = np.where(
            alive, -np.expm1(-2 * np.maximum(gap_before, 0) * np.maximum(gap_after, 0) / dt), 0.0
        )
        end = level[:, -1]
        weight = np.prod(survive, axis=1) * ((end >= z_lo) & (end <= z_hi))
        total += float(weight.sum())
        total_sq += float((weight * weight).sum())

    estimate = total / paths
    variance = max(total_sq / paths - estimate**2, 0.0)
    se = math.sqrt(variance / (paths - 1))
    closed = reflection_mass(x, y, mu, t, z_lo, z_hi)
    return BarrierEstimate(
        x=x,
        y=y,
        mu=mu,
        t=t,
        z_lo=z_lo,
        z_hi=z_hi,
        paths=paths,
        steps=steps,
        estimate=estimate,
        standard_error=se,
        closed_form=closed,
        within_3se=abs(estimate - closed) <= 3 * se + 1e-12,
        seed=seed,
    )
