"""Pathwise identity and coupling suites replayed over many traced explorations."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from src.exploration.checks import check_counter_identities
from src.exploration.process import ActivePolicy, StopRule, explore
from src.harness.runner import run_trials
from src.schemas import CheckReport, Params, Violation
from src.shared.streams import RandomStream
from src.utils.metrics import TRIAL_SUCCESSES, TRIALS_TOTAL
from src.utils.tracing import tracer
from src.walks.coupled_walks import check_coupling, make_aux

logger = logging.getLogger("regulus")

_AUX = 1


@dataclass(frozen=True)
class _SuiteJob:
    suite: str
    params: Params
    seed: int
    stop: StopRule
    policy: ActivePolicy
    A: float


def _suite_report(job: _SuiteJob, index: int) -> CheckReport:
    stream = RandomStream(job.seed, index)
    stop = job.stop if job.suite == "counters" else StopRule.FIRST_COMPONENT
    trace = explore(job.params, stop=stop, policy=job.policy, stream=stream)
    if job.suite == "counters":
        return check_counter_identities(trace)
    aux = make_aux(trace, max(1, trace.phase_one_steps), stream.child(_AUX), A=job.A)
    return check_coupling(trace, aux)


def _suite_chunk(job: _SuiteJob, lo: int, hi: int) -> tuple[int, int]:
    checks = failed = 0
    for i in range(lo, hi):
        report = _suite_report(job, i)
        checks += report.checks
        if not report.passed:
            failed += 1
            logger.error(
                f"{job.suite} trial {i}: {[v.model_dump() for v in report.violations]}"
            )
    return checks, failed


def _verify(suite: str, job: _SuiteJob, trials: int, threads: int | None) -> CheckReport:
    with tracer.start_as_current_span(f"verify_{suite}"):
        checks, failed = run_trials(_suite_chunk, job, trials, threads)
    TRIALS_TOTAL.labels(experiment=suite).inc(trials)
    TRIAL_SUCCESSES.labels(experiment=suite).inc(trials - failed)
    violations = []
    if failed:
        violations.append(
            Violation(check=suite, detail=f"{failed} of {trials} traces violated an identity")
        )
    logger.info(f"{suite}: {trials - failed}/{trials} traces clean, {checks} checks")
    return CheckReport(name=suite, passed=not failed, checks=checks, violations=violations)


def verify_counters(
    params: Params,
    trials: int,
    seed: int,
    stop: StopRule = StopRule.FULL_GRAPH,
    policy: ActivePolicy = ActivePolicy.FIFO,
    threads: int | None = None,
) -> CheckReport:
    """Counter identities of every phase, over `trials` independent traces."""
    job = _SuiteJob("counters", params, seed, StopRule(stop), ActivePolicy(policy), 1.0)
    return _verify("counters", job, trials, threads)


def verify_coupling(
    params: Params,
    trials: int,
    seed: int,
    policy: ActivePolicy = ActivePolicy.FIFO,
    threads: int | None = None,
) -> CheckReport:
    """Walk orderings over phase one; m and T' derive from A (1 when unset)."""
    A = params.A if params.A is not None else 1.0
    job = _SuiteJob("coupling", params, seed, StopRule.FIRST_COMPONENT, ActivePolicy(policy), A)
    return _verify("coupling", job, trials, threads)
