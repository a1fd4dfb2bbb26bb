"""
Unit tests for the comparison walks evaluated on exploration traces.
"""

import math

import numpy as np
import pytest
from scipy import stats

from src.errors import HorizonError
from src.exploration.process import ActivePolicy, explore
from src.schemas import Params
from src.shared.stats import chi_square_pvalue
from src.shared.streams import RandomStream
from src.walks.coupled_walks import (
    SeriesKind,
    a_n,
    check_coupling,
    first_hit,
    fresh_thresholds,
    make_aux,
    series,
)


def _trace_and_aux(params: Params, seed: int, extra: int = 0, policy=ActivePolicy.FIFO):
    stream = RandomStream(seed, 0)
    trace = explore(params, policy=policy, stream=stream)
    aux = make_aux(trace, trace.phase_one_steps + extra, stream.child(1), A=1.0)
    return trace, aux


# ---------------------------------------------------------------------------
# Scalar helpers
# ---------------------------------------------------------------------------


def test_a_n_value():
    assert a_n(10, 100) == pytest.approx(89.5)
    assert a_n(0, 100) == 99


def test_a_n_rejects_negative_index():
    with pytest.raises(ValueError):
        a_n(-1, 10)


def test_fresh_thresholds_first_entry():
    x = fresh_thresholds(100, 3, 5.0, 3)
    assert x[0] == pytest.approx(3 * (99 + 5) / 299)
    assert len(x) == 3


@pytest.mark.parametrize(
    "values, start, expected",
    [
        ([-1, -1, -1], 3, 3),
        ([1, -1, -1, -1, -1], 3, 5),
        ([1, 1, -1], 3, math.inf),
    ],
)
def test_first_hit_examples(values, start, expected):
    assert first_hit(np.array(values), start) == expected


def test_first_hit_needs_start_for_bare_arrays():
    with pytest.raises(ValueError):
        first_hit(np.array([-1]))


# ---------------------------------------------------------------------------
# Series on traces
# ---------------------------------------------------------------------------


def test_eta_hits_zero_exactly_at_tau(critical_params):
    for seed in range(20):
        trace, _ = _trace_and_aux(critical_params, seed)
        eta = series(trace, SeriesKind.ETA)
        assert first_hit(eta) == trace.tau


def test_class_based_series_stop_at_tau(critical_params):
    trace, aux = _trace_and_aux(critical_params, 0, extra=10)
    with pytest.raises(HorizonError):
        series(trace, SeriesKind.ETA, horizon=trace.tau + 1)
    # retention-driven walks continue past tau
    xi = series(trace, SeriesKind.XI, aux, trace.tau + 10)
    assert len(xi.values) == trace.tau + 10


def test_uniform_driven_series_need_aux(critical_params):
    trace, _ = _trace_and_aux(critical_params, 0)
    with pytest.raises(ValueError):
        series(trace, SeriesKind.MU)


def test_d_prime_is_standardised_two_point(critical_params):
    trace, aux = _trace_and_aux(critical_params, 3, extra=200)
    values = series(trace, SeriesKind.D_PRIME, aux).values
    root = math.sqrt(critical_params.d - 2)
    assert np.all(np.isclose(values, -1 / root) | np.isclose(values, root))


def test_xi_splits_into_mu_and_mu_prime(small_params):
    trace, aux = _trace_and_aux(small_params, 5, extra=50)
    xi = series(trace, SeriesKind.XI, aux).values
    mu = series(trace, SeriesKind.MU, aux).values
    mu_prime = series(trace, SeriesKind.MU_PRIME, aux).values
    assert np.array_equal(xi, mu + mu_prime)


@pytest.mark.slow
def test_xi_sums_are_binomial(small_params):
    # sum of t xi steps = (d-1) B - t with B ~ Bin(t, p)
    t, d = 20, small_params.d
    counts = np.zeros(t + 1)
    for seed in range(3000):
        trace, aux = _trace_and_aux(small_params, seed, extra=t)
        total = int(series(trace, SeriesKind.XI, aux, horizon=t).values.sum())
        counts[(total + t) // (d - 1)] += 1
    law = stats.binom.pmf(np.arange(t + 1), t, small_params.p)
    assert chi_square_pvalue(counts, law) > 1e-3


@pytest.mark.slow
def test_d_prime_has_zero_mean_and_unit_variance(critical_params):
    chunks = []
    for seed in range(100):
        trace, aux = _trace_and_aux(critical_params, seed, extra=200)
        chunks.append(series(trace, SeriesKind.D_PRIME, aux, horizon=200).values)
    pooled = np.concatenate(chunks)
    size = len(pooled)
    assert abs(pooled.mean()) <= 5 / math.sqrt(size)
    assert abs(pooled.var() - 1.0) <= 5 * math.sqrt(0.5 / size)


# ---------------------------------------------------------------------------
# Pathwise coupling
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("d", [3, 4, 6])
@pytest.mark.parametrize("policy", list(ActivePolicy))
def test_coupling_orders_hold_on_every_trace(d, policy):
    params = Params(n=300, d=d, lambda_=0.5)
    for seed in range(15):
        trace, aux = _trace_and_aux(params, seed, policy=policy)
        report = check_coupling(trace, aux)
        assert report.passed, report.violations


def test_coupling_needs_aux_over_phase_one(critical_params):
    stream = RandomStream(0, 0)
    trace = explore(critical_params, stream=stream)
    aux = make_aux(trace, 0, stream.child(1), A=1.0)
    with pytest.raises(HorizonError):
        check_coupling(trace, aux)


def test_make_aux_needs_m_or_A(critical_params, stream):
    trace = explore(critical_params, stream=stream)
    with pytest.raises(ValueError):
        make_aux(trace, 5, stream.child(1))
