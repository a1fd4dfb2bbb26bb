"""
Integration tests for the Monte Carlo harness: reproducibility across
worker counts, degenerate regimes, conditioning and the scaling fit.
"""

import math

import pytest

from src.errors import InfeasibleParametersError
from src.harness.mc_harness import estimate_simple_prob, run_tail, scaling_diagnostic
from src.harness.runner import chunk_bounds, run_trials
from src.harness.verification import verify_counters, verify_coupling
from src.schemas import Params
from src.shared.stats import proportion_interval, standard_error


def _count_even(job, lo, hi):
    return (sum(1 for i in range(lo, hi) if i % job == 0), hi - lo)


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("trials, workers", [(1, 4), (10, 1), (103, 3), (1000, 8)])
def test_chunks_cover_every_trial_once(trials, workers):
    bounds = chunk_bounds(trials, workers)
    assert bounds[0][0] == 0 and bounds[-1][1] == trials
    assert all(a[1] == b[0] for a, b in zip(bounds, bounds[1:]))


def test_run_trials_sums_chunks():
    assert run_trials(_count_even, 2, 101, threads=1) == (51, 101)
    assert run_trials(_count_even, 2, 101, threads=3) == (51, 101)


# ---------------------------------------------------------------------------
# Tail estimates
# ---------------------------------------------------------------------------


def test_tail_is_independent_of_worker_count():
    params = Params(n=300, d=3, lambda_=0.0, A=0.5)
    serial = run_tail(params, "MAX", False, 200, seed=42, threads=1)
    parallel = run_tail(params, "MAX", False, 200, seed=42, threads=3)
    assert serial.successes == parallel.successes


def test_vertex_never_beats_max_on_common_randomness():
    params = Params(n=300, d=3, lambda_=0.0, A=0.5)
    vertex = run_tail(params, "VERTEX", False, 300, seed=7, threads=1)
    largest = run_tail(params, "MAX", False, 300, seed=7, threads=1)
    assert vertex.successes <= largest.successes


def test_p_zero_never_exceeds():
    est = run_tail(Params(n=50, d=3, p=0.0), "MAX", False, 100, seed=1, threshold=1.5, threads=1)
    assert est.successes == 0
    assert est.p_hat == 0.0
    assert est.A == pytest.approx(1.5 / 50 ** (2 / 3))


def test_full_retention_on_simple_k4_is_connected():
    est = run_tail(Params(n=4, d=3, p=1.0), "MAX", True, 50, seed=3, threshold=3.5, threads=1)
    assert est.p_hat == 1.0
    assert est.simple


def test_threshold_at_n_is_infeasible():
    with pytest.raises(InfeasibleParametersError):
        run_tail(Params(n=50, d=3, p=0.5), "MAX", False, 10, seed=0, threshold=50, threads=1)


def test_tail_needs_a_threshold():
    with pytest.raises(InfeasibleParametersError):
        run_tail(Params(n=50, d=3, p=0.5), "MAX", False, 10, seed=0, threads=1)


# ---------------------------------------------------------------------------
# Simplicity
# ---------------------------------------------------------------------------


def test_two_vertex_graphs_are_never_simple():
    est = estimate_simple_prob(2, 3, 500, seed=0, threads=1)
    assert est.successes == 0


def test_simple_probability_of_k4_is_covered():
    est = estimate_simple_prob(4, 3, 20_000, seed=11, threads=2)
    lo, hi = proportion_interval(est.successes, est.trials, level=0.999)
    assert lo <= 1296 / 10395 <= hi


def test_simple_prob_rejects_odd_stub_count():
    with pytest.raises(InfeasibleParametersError):
        estimate_simple_prob(3, 3, 10, seed=0)


@pytest.mark.slow
def test_simple_probability_approaches_cubic_limit():
    # d=3: P(simple) -> exp(-(d^2 - 1) / 4) = e^-2
    limit = math.exp(-2.0)
    trials = 40_000
    points = {}
    for k, n in enumerate([20, 50, 100, 200]):
        est = estimate_simple_prob(n, 3, trials, seed=100 + k, threads=2)
        se = standard_error(limit, trials)
        assert abs(est.p_hat - limit) <= 0.02 + 4 * se, n
        points[n] = (abs(est.p_hat - limit), se)

    err_200, se_200 = points[200]
    err_20, se_20 = points[20]
    assert err_200 <= 0.005 + 4 * se_200
    assert err_200 <= err_20 + 4 * math.hypot(se_20, se_200)


# ---------------------------------------------------------------------------
# Scaling diagnostic and suites
# ---------------------------------------------------------------------------


def test_scaling_points_decrease_along_the_grid():
    report = scaling_diagnostic(3, 500, 0.0, [0.5, 1.0, 1.5], 400, seed=5, threads=1)
    assert report.decreasing
    p_hats = [pt.p_hat for pt in report.points]
    assert p_hats == sorted(p_hats, reverse=True)
    for pt in report.points:
        assert pt.regressor == pytest.approx(-(pt.A**3) / 36)


def test_counter_suite_passes(small_params):
    report = verify_counters(small_params, 60, seed=1, threads=2)
    assert report.passed
    assert report.checks > 0


def test_coupling_suite_passes(critical_params):
    report = verify_coupling(critical_params, 60, seed=2, threads=1)
    assert report.passed
