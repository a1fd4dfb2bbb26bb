"""
Reproducible Monte Carlo experiments.

PURPOSE:
    Tail probabilities of component sizes, the probability that a matching
    is simple, and the scaling diagnostic that fits estimated tails against
    the exponent G_lambda(A, d).

DESIGN:
    Each trial runs the compiled exploration kernel on its own uniform
    buffer from RandomStream(seed, trial). MAX trials explore the full graph
    and stop as soon as any phase exceeds the threshold; VERTEX trials stop
    with the first component. Conditioning on simplicity rejects matchings
    before percolation, then replays the FIXED graph through the same kernel.
    Trials are farmed out by harness.runner and merged by integer sums.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np
from scipy import stats

from src.config import settings
from src.errors import InfeasibleParametersError
from src.exploration.kernels import explore_sizes
from src.exploration.process import buffer_size
from src.graph.config_graph import is_simple, sample_mask, sample_matching, sample_simple_matching
from src.harness.runner import run_trials
from src.schemas import Params, RegressionReport, ScalingPoint, TailEstimate
from src.shared.stats import proportion_interval
from src.shared.streams import RandomStream
from src.theory.exponent import ExponentVariant, g_exponent
from src.utils.metrics import EXPERIMENT_DURATION, TRIAL_SUCCESSES, TRIALS_TOTAL
from src.utils.tracing import set_run_attributes, tracer

logger = logging.getLogger("regulus")

TailMode = Literal["VERTEX", "MAX"]

_NO_INTS = np.empty(0, np.int64)
_NO_FLAGS = np.empty(0, np.bool_)

# child-stream tags of a conditioned trial
_MATCHING, _MASK, _WALK = 0, 1, 2


@dataclass(frozen=True)
class _TailJob:
    params: Params
    mode: TailMode
    condition_on_simple: bool
    threshold: float
    seed: int
    max_attempts: int


def tail_trial(job: _TailJob, index: int) -> bool:
    """One trial: does the explored component (VERTEX) or any component (MAX) exceed the threshold?"""
    params = job.params
    n, d, p = params.n, params.d, params.p
    stream = RandomStream(job.seed, index)
    stop_first = job.mode == "VERTEX"

    if job.condition_on_simple:
        matching, _ = sample_simple_matching(params, stream.child(_MATCHING), job.max_attempts)
        matching = sample_mask(matching, p, stream.child(_MASK))
        uniforms = stream.child(_WALK).uniforms(buffer_size(n, d, lazy=False))
        partner, pair_of, retained = matching.partner, matching.pair_of, matching.retained
    else:
        uniforms = stream.uniforms(buffer_size(n, d, lazy=True))
        partner, pair_of, retained = _NO_INTS, _NO_INTS, _NO_FLAGS

    first, largest, _, _ = explore_sizes(
        n, d, p, -1, False, stop_first, job.threshold, partner, pair_of, retained, uniforms
    )
    size = first if stop_first else largest
    return size > job.threshold


def _tail_chunk(job: _TailJob, lo: int, hi: int) -> tuple[int]:
    return (sum(tail_trial(job, i) for i in range(lo, hi)),)


def _estimate(
    params: Params | None,
    n: int,
    d: int,
    mode: str,
    simple: bool,
    trials: int,
    successes: int,
    seed: int,
    elapsed: float,
    A: float | None = None,
) -> TailEstimate:
    lo, hi = proportion_interval(successes, trials)
    return TailEstimate(
        d=d,
        n=n,
        p=None if params is None else params.p,
        lambda_=None if params is None else params.lambda_,
        A=A,
        mode=mode,
        simple=simple,
        trials=trials,
        successes=successes,
        p_hat=successes / trials,
        ci_lo=lo,
        ci_hi=hi,
        seed=seed,
        elapsed_s=elapsed,
    )


def run_tail(
    params: Params,
    mode: TailMode,
    condition_on_simple: bool,
    trials: int,
    seed: int,
    threshold: float | None = None,
    threads: int | None = None,
) -> TailEstimate:
    """
    Estimate P(|C(v)| > threshold) (VERTEX) or P(|C_max| > threshold) (MAX).

    The threshold defaults to A n^{2/3}. When an explicit threshold is given
    without A, the record carries A = threshold / n^{2/3}.
    """
    if trials < 1:
        raise InfeasibleParametersError("trials must be >= 1")
    if mode not in ("VERTEX", "MAX"):
        raise InfeasibleParametersError(f"unknown tail mode {mode!r}")
    if threshold is None:
        threshold = params.threshold
        if threshold is None:
            raise InfeasibleParametersError("tail threshold needs A or an explicit value")
    if threshold >= params.n:
        raise InfeasibleParametersError(
            f"threshold {threshold} >= n = {params.n}: the event is empty"
        )
    A = params.A if params.A is not None else threshold / params.n ** (2.0 / 3.0)

    job = _TailJob(
        params=params,
        mode=mode,
        condition_on_simple=condition_on_simple,
        threshold=float(threshold),
        seed=seed,
        max_attempts=settings.SIMPLE_MAX_ATTEMPTS,
    )
    with tracer.start_as_current_span("run_tail") as span:
        set_run_attributes(span, n=params.n, d=params.d, p=params.p, mode=mode, trials=trials, seed=seed)
        started = time.perf_counter()
        (successes,) = run_trials(_tail_chunk, job, trials, threads)
        elapsed = time.perf_counter() - started

    TRIALS_TOTAL.labels(experiment="tail").inc(trials)
    TRIAL_SUCCESSES.labels(experiment="tail").inc(successes)
    EXPERIMENT_DURATION.labels(experiment="tail").observe(elapsed)
    logger.info(
        f"tail {mode} n={params.n} d={params.d} p={params.p:.6g} threshold={threshold:.6g}: "
        f"{successes}/{trials} in {elapsed:.2f}s"
    )
    return _estimate(
        params, params.n, params.d, mode, condition_on_simple, trials, successes, seed, elapsed, A
    )


# ---------------------------------------------------------------------------
# Simplicity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _SimpleJob:
    params: Params
    seed: int


def _simple_chunk(job: _SimpleJob, lo: int, hi: int) -> tuple[int]:
    hits = 0
    for i in range(lo, hi):
        hits += is_simple(sample_matching(job.params, RandomStream(job.seed, i)))
    return (hits,)


def estimate_simple_prob(
    n: int, d: int, trials: int, seed: int, threads: int | None = None
) -> TailEstimate:
    """Fraction of uniformly sampled matchings whose multigraph is simple."""
    if trials < 1:
        raise InfeasibleParametersError("trials must be >= 1")
    if (n * d) % 2:
        raise InfeasibleParametersError(f"d*n = {n * d} is odd; no perfect matching")
    params = Params(n=n, d=d, p=0.0)
    with tracer.start_as_current_span("estimate_simple_prob") as span:
        set_run_attributes(span, n=n, d=d, trials=trials, seed=seed)
        started = time.perf_counter()
        (hits,) = run_trials(_simple_chunk, _SimpleJob(params, seed), trials, threads)
        elapsed = time.perf_counter() - started

    TRIALS_TOTAL.labels(experiment="simple").inc(trials)
    TRIAL_SUCCESSES.labels(experiment="simple").inc(hits)
    EXPERIMENT_DURATION.labels(experiment="simple").observe(elapsed)
    logger.info(f"simple n={n} d={d}: {hits}/{trials} in {elapsed:.2f}s")
    return _estimate(None, n, d, "SIMPLE", False, trials, hits, seed, elapsed)


# ---------------------------------------------------------------------------
# Scaling diagnostic
# ---------------------------------------------------------------------------


def _fit(points: list[ScalingPoint]):
    usable = [pt for pt in points if pt.response is not None]
    if len(usable) < 2 or len({pt.regressor for pt in usable}) < 2:
        return None
    return stats.linregress(
        [pt.regressor for pt in usable], [pt.response for pt in usable]
    )


def scaling_diagnostic(
    d: int,
    n: int,
    lam: float,
    A_grid: Iterable[float],
    trials: int,
    seed: int,
    variant: ExponentVariant = ExponentVariant.THEOREM11,
    threads: int | None = None,
) -> RegressionReport:
    """
    MAX-mode tails along A_grid, regressing log p_hat + 1.5 log A on -G.

    Every grid point shares the master seed, so the estimates are computed
    on common random numbers and p_hat is non-increasing in A.
    Points with fewer than MIN_SUCCESSES successes are flagged; points with
    none are kept in the report but left out of the fit.
    """
    grid = sorted(float(a) for a in A_grid)
    if not grid:
        raise InfeasibleParametersError("A_grid is empty")
    points: list[ScalingPoint] = []
    with tracer.start_as_current_span("scaling_diagnostic"):
        for A in grid:
            params = Params(n=n, d=d, lambda_=lam, A=A)
            est = run_tail(params, "MAX", False, trials, seed, threads=threads)
            G = g_exponent(A, lam, d, variant)
            response = None
            reason = ""
            if est.successes:
                response = math.log(est.p_hat) + 1.5 * math.log(A)
            else:
                reason = "no successes; excluded from fit"
            if est.successes < settings.MIN_SUCCESSES and not reason:
                reason = f"fewer than {settings.MIN_SUCCESSES} successes"
            points.append(
                ScalingPoint(
                    A=A,
                    G=G,
                    regressor=-G,
                    response=response,
                    p_hat=est.p_hat,
                    ci_lo=est.ci_lo,
                    ci_hi=est.ci_hi,
                    successes=est.successes,
                    trials=trials,
                    flagged=est.successes < settings.MIN_SUCCESSES,
                    reason=reason,
                )
            )
            if points[-1].flagged:
                logger.warning(f"scaling point A={A}: {reason}")

    fit = _fit(points)
    upper = _fit(points[len(points) // 2 :])
    residuals: list[float] = []
    if fit is not None:
        residuals = [
            pt.response - (fit.intercept + fit.slope * pt.regressor)
            for pt in points
            if pt.response is not None
        ]
    decreasing = all(
        b.p_hat < a.p_hat or b.ci_lo <= a.ci_hi for a, b in zip(points, points[1:])
    )
    return RegressionReport(
        d=d,
        n=n,
        lambda_=lam,
        variant=ExponentVariant(variant).value,
        points=points,
        slope=None if fit is None else float(fit.slope),
        intercept=None if fit is None else float(fit.intercept),
        slope_stderr=None if fit is None else float(fit.stderr),
        residuals=residuals,
        upper_half_slope=None if upper is None else float(upper.slope),
        decreasing=decreasing,
        seed=seed,
    )
