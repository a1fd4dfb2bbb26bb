"""
Unit tests for the exact oracles: lattice walks, binomial masses and
exhaustive enumeration of tiny configuration models.
"""

from fractions import Fraction

import numpy as np
import pytest

from src.errors import InfeasibleParametersError, OracleSizeError
from src.oracles.binomial import binomial_exact
from src.oracles.enumeration import (
    enumerate_matchings,
    exhaustive_small_graph,
    multigraph_census,
    multigraph_connectivity_probability,
)
from src.oracles.lattice import (
    ANY,
    walk_stay_positive_enumerate,
    walk_stay_positive_exact,
)
from src.shared.streams import RandomStream

# ---------------------------------------------------------------------------
# Lattice walks
# ---------------------------------------------------------------------------


def test_simple_walk_example():
    half = Fraction(1, 2)
    result = walk_stay_positive_exact(3, 1, {-1: half, 1: half}, end_at=2)
    assert result.exact
    assert result.value == Fraction(1, 4)


def test_start_on_barrier_gives_zero():
    assert walk_stay_positive_exact(4, 0, {1: Fraction(1)}).value == 0


def test_upward_walk_always_survives():
    result = walk_stay_positive_exact(10, 1, [(1, Fraction(1))], end_at=ANY)
    assert result.value == 1


def test_moving_barrier():
    # level must exceed j after j steps: only the all-up path of +2 steps survives
    law = {2: Fraction(1, 3), 0: Fraction(2, 3)}
    result = walk_stay_positive_exact(3, 1, law, barrier=lambda j: j)
    assert result.value == walk_stay_positive_enumerate(3, 1, law, barrier=lambda j: j)


def _random_law(stream: RandomStream) -> dict[int, Fraction]:
    values = [-2, -1, 0, 1, 2, 3]
    weights = [int(w) for w in (stream.uniforms(len(values)) * 9).astype(np.int64)]
    if not any(weights):
        weights[0] = 1
    total = sum(weights)
    return {x: Fraction(w, total) for x, w in zip(values, weights) if w}


@pytest.mark.parametrize("seed", range(20))
def test_dp_equals_path_enumeration(seed):
    stream = RandomStream(seed, 0)
    law = _random_law(stream)
    t = 1 + int(stream.uniform() * 6)
    start = 1 + int(stream.uniform() * 3)
    for end_at in (ANY, start, start + 1):
        dp = walk_stay_positive_exact(t, start, law, end_at=end_at)
        assert dp.exact
        assert dp.value == walk_stay_positive_enumerate(t, start, law, end_at=end_at)


def test_float_fallback_beyond_exact_horizon():
    half = Fraction(1, 2)
    result = walk_stay_positive_exact(40, 5, {-1: half, 1: half})
    assert not result.exact
    assert 0.0 < float(result) < 1.0


def test_float_law_is_not_exact():
    assert not walk_stay_positive_exact(3, 1, {-1: 0.5, 1: 0.5}).exact


def test_enumeration_is_capped():
    with pytest.raises(OracleSizeError):
        walk_stay_positive_enumerate(13, 1, {1: Fraction(1)})


# ---------------------------------------------------------------------------
# Binomial
# ---------------------------------------------------------------------------


def test_binomial_point_and_tail():
    assert binomial_exact(4, 0.5, 2) == pytest.approx(0.375)
    assert binomial_exact(4, 0.5, 4, tail=True) == pytest.approx(0.0625)


def test_binomial_rational_is_exact():
    assert binomial_exact(4, Fraction(1, 2), 2) == Fraction(3, 8)
    assert binomial_exact(4, Fraction(1, 2), 3, tail=True) == Fraction(5, 16)


def test_binomial_masses_sum_to_one():
    total = sum(binomial_exact(2000, 0.3, j) for j in range(2001))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_binomial_out_of_range():
    assert binomial_exact(10, 0.3, 11) == 0.0
    assert binomial_exact(10, 0.3, 0, tail=True) == 1.0


def test_binomial_is_capped():
    with pytest.raises(OracleSizeError):
        binomial_exact(10**6 + 1, 0.5, 3)


# ---------------------------------------------------------------------------
# Exhaustive enumeration
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("n, d, count", [(2, 3, 15), (4, 3, 10395), (2, 4, 105)])
def test_matching_count_is_double_factorial(n, d, count):
    assert sum(1 for _ in enumerate_matchings(n, d)) == count


def test_enumeration_rejects_odd_and_large():
    with pytest.raises(InfeasibleParametersError):
        list(enumerate_matchings(3, 3))
    with pytest.raises(OracleSizeError):
        multigraph_census(4, 4)


def test_probability_of_simple_k4():
    result = exhaustive_small_graph(4, 3, Fraction(1, 2))
    assert result.matchings == 10395
    assert result.p_simple == Fraction(1296, 10395)


def test_two_vertices_are_never_simple():
    result = exhaustive_small_graph(2, 3, Fraction(1, 2))
    assert result.p_simple == 0
    with pytest.raises(InfeasibleParametersError):
        exhaustive_small_graph(2, 3, Fraction(1, 2), condition_on_simple=True)


def test_p_zero_leaves_isolated_vertices():
    result = exhaustive_small_graph(4, 3, Fraction(0))
    assert result.max_component.probabilities == {1: 1}
    assert result.component_of_start.probabilities == {1: 1}


def test_p_one_on_simple_graph_is_connected():
    result = exhaustive_small_graph(4, 3, Fraction(1), condition_on_simple=True)
    assert result.max_component.probabilities == {4: 1}


@pytest.mark.parametrize("p", [Fraction(1, 3), Fraction(1, 2), Fraction(4, 5)])
def test_exhaustive_laws_are_normalised(p):
    result = exhaustive_small_graph(4, 3, p)
    assert result.max_component.total_mass == 1
    assert result.component_of_start.total_mass == 1
    # the start's component never beats the largest one
    for s in range(1, 5):
        assert result.component_of_start.tail(s) <= result.max_component.tail(s)


def test_float_p_gives_float_law():
    result = exhaustive_small_graph(2, 3, 0.5)
    assert not result.max_component.exact
    assert result.max_component.total_mass == pytest.approx(1.0)


def test_connectivity_matches_full_retention():
    result = exhaustive_small_graph(4, 3, Fraction(1))
    assert result.max_component.probabilities.get(4, 0) == multigraph_connectivity_probability(4, 3)


def test_worker_count_does_not_change_the_law():
    serial = exhaustive_small_graph(4, 3, Fraction(1, 2), workers=1)
    parallel = exhaustive_small_graph(4, 3, Fraction(1, 2), workers=2)
    assert serial.max_component.probabilities == parallel.max_component.probabilities


def test_record_writes_rationals():
    record = exhaustive_small_graph(2, 3, Fraction(1, 2)).to_record()
    assert record.p == "1/2"
    assert record.p_simple == "0"
    assert record.max_component.total_mass == "1"
