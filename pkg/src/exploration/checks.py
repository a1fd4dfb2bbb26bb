"""
Pathwise identity checks on exploration traces.

Every check compares two independently maintained quantities: the counters
accumulated during the run against the per-step columns, or a recorded state
column against the value implied by the step increments. Nothing is assumed;
a disagreement is reported with the first step where it shows.
"""

from __future__ import annotations

import numpy as np

from src.exploration.process import ExplorationTrace, HitClass, PhaseStats, StopRule
from src.schemas import CheckReport, Violation
from src.utils.metrics import CHECK_VIOLATIONS


def _first_failure(ok: np.ndarray) -> int | None:
    bad = np.flatnonzero(~ok)
    return int(bad[0]) + 1 if len(bad) else None


class _Collector:
    def __init__(self, name: str):
        self.name = name
        self.checks = 0
        self.violations: list[Violation] = []

    def expect(self, check: str, ok: bool, step: int | None = None, detail: str = ""):
        self.checks += 1
        if not ok:
            self.violations.append(Violation(check=check, step=step, detail=detail))
            CHECK_VIOLATIONS.labels(check=check).inc()

    def expect_columns(self, check: str, ok: np.ndarray, detail: str = ""):
        self.expect(check, bool(np.all(ok)), _first_failure(ok), detail)

    def report(self) -> CheckReport:
        return CheckReport(
            name=self.name,
            passed=not self.violations,
            checks=self.checks,
            violations=self.violations,
        )


def _phase_balance(ph: PhaseStats) -> int:
    """initial_active - 2 sigma_A - sigma_UNR + sum_m (m-2) N_m; zero for a complete phase."""
    drift = sum((m - 2) * ph.n_m[m] for m in range(1, ph.d + 1))
    return ph.initial_active - 2 * ph.sigma_a - ph.sigma_unr + drift


def phase_one_increments(trace: ExplorationTrace) -> np.ndarray:
    """Active-count increments 1_U 1_R (m-1) - 1_A - 1 over phase one."""
    t1 = trace.phase_one_steps
    active_hit = trace.hit_class[:t1] == HitClass.ACTIVE
    unseen_retained = trace.retained[:t1] & ~active_hit
    m = trace.unseen_before[:t1].astype(np.int64)
    return unseen_retained * (m - 1) - active_hit.astype(np.int64) - 1


def check_counter_identities(trace: ExplorationTrace) -> CheckReport:
    """
    Phase-one counter identities and the sandwich of sigma_UR:

        tau = sigma_UR + sigma_UNR + sigma_A
        0   = d - 2 sigma_A - sigma_UNR + sum_m (m-2) N_m
        (tau-d)/(d-1) <= (tau+sigma_A-d)/(d-1) <= sigma_UR <= (tau+sigma_A)/(d-1) + sigma_NF

    plus the recount of every counter from the step columns, the balance
    identity of every later complete phase, status conservation, the
    active-count recursion and the fresh-vertex count.
    """
    out = _Collector("counter-identities")
    first = trace.phases[0]
    if not first.complete:
        raise ValueError("counter identities need a complete phase one")

    d, tau = trace.d, first.tau
    out.expect(
        "tau-decomposition",
        tau == first.sigma_ur + first.sigma_unr + first.sigma_a,
        tau,
        f"tau={tau}, UR={first.sigma_ur}, UNR={first.sigma_unr}, A={first.sigma_a}",
    )
    out.expect("active-balance", _phase_balance(first) == 0, tau)

    # chain multiplied through by d-1, in integers
    lhs0 = tau - d
    lhs1 = tau + first.sigma_a - d
    mid = (d - 1) * first.sigma_ur
    rhs = tau + first.sigma_a + (d - 1) * first.sigma_nf
    out.expect("chain-tau", lhs0 <= lhs1, tau)
    out.expect("chain-lower", lhs1 <= mid, tau, f"{lhs1} > {mid}")
    out.expect("chain-upper", mid <= rhs, tau, f"{mid} > {rhs}")

    for ph in trace.phases[1:]:
        if ph.complete:
            out.expect("later-phase-balance", _phase_balance(ph) == 0, ph.start_step)

    # recount phase-one counters from the columns
    cls = trace.hit_class[:tau]
    r = trace.retained[:tau]
    m = trace.unseen_before[:tau]
    unseen_hit = cls != HitClass.ACTIVE
    out.expect("recount-UR", int(np.sum(unseen_hit & r)) == first.sigma_ur, tau)
    out.expect("recount-UNR", int(np.sum(unseen_hit & ~r)) == first.sigma_unr, tau)
    out.expect("recount-A", int(np.sum(~unseen_hit)) == first.sigma_a, tau)
    out.expect(
        "recount-NF",
        int(np.sum(unseen_hit & (m < d))) == first.sigma_nf,
        tau,
    )
    for k in range(1, d + 1):
        out.expect(
            f"recount-N{k}",
            int(np.sum(unseen_hit & r & (m == k))) == first.n_m[k],
            tau,
        )

    report = check_status_conservation(trace)
    out.checks += report.checks
    out.violations += report.violations

    report = check_active_recursion(trace)
    out.checks += report.checks
    out.violations += report.violations

    report = check_fresh_identity(trace)
    out.checks += report.checks
    out.violations += report.violations
    return out.report()


check_lemma21 = check_counter_identities


def check_status_conservation(trace: ExplorationTrace) -> CheckReport:
    """|A_t| + |U_t| + |E_t| = dn, with |E_t| = 2t, after every step."""
    out = _Collector("status-conservation")
    t = np.arange(1, trace.steps + 1)
    total = trace.active_after + trace.unseen_after + 2 * t
    out.expect_columns("conservation", total == trace.n * trace.d)
    nonnegative = (trace.active_after >= 0) & (trace.unseen_after >= 0)
    out.expect_columns("nonnegative", nonnegative)
    return out.report()


def check_active_recursion(trace: ExplorationTrace) -> CheckReport:
    """Within phase one, |A_t| = d + sum_{i<=t} eta_i and |A_t| > 0 before tau."""
    out = _Collector("active-recursion")
    eta = phase_one_increments(trace)
    predicted = trace.d + np.cumsum(eta)
    recorded = trace.active_after[: len(eta)]
    out.expect_columns("active-count", predicted == recorded)
    if trace.phases[0].complete and len(eta):
        out.expect_columns("positive-before-tau", recorded[:-1] > 0)
        out.expect("empty-at-tau", int(recorded[-1]) == 0, len(eta))
    return out.report()


def check_fresh_identity(trace: ExplorationTrace) -> CheckReport:
    """Within phase one, |V^(d)_i| = n - 1 - i + #{j <= i : h_j not fresh}."""
    out = _Collector("fresh-identity")
    t1 = trace.phase_one_steps
    not_fresh = trace.hit_class[:t1] != HitClass.UNSEEN_FRESH
    i = np.arange(1, t1 + 1)
    predicted = trace.n - 1 - i + np.cumsum(not_fresh)
    out.expect_columns("fresh-count", predicted == trace.fresh_after[:t1])
    return out.report()


def check_against_components(
    trace: ExplorationTrace, sizes: list[int], start_size: int
) -> CheckReport:
    """Compare trace-derived sizes with a reference component structure."""
    out = _Collector("component-sizes")
    out.expect(
        "start-component",
        trace.phases[0].size == start_size,
        trace.phase_one_steps,
        f"trace {trace.phases[0].size} vs reference {start_size}",
    )
    if trace.stop is StopRule.FULL_GRAPH:
        derived = trace.component_sizes()
        out.expect(
            "all-components",
            derived == sorted(sizes, reverse=True),
            trace.steps,
            f"trace {derived} vs reference {sorted(sizes, reverse=True)}",
        )
    return out.report()


def sandwich_check(trace: ExplorationTrace, k: int) -> bool:
    """Pathwise implication tau > (d-1)(k+1) => |C(start)| > k."""
    first = trace.phases[0]
    if not first.complete:
        raise ValueError("sandwich check needs a complete phase one")
    if first.tau > (trace.d - 1) * (k + 1):
        return first.size > k
    return True
