"""
Unit tests for the closed-form theory: horizons, the tail exponent,
q-curves, ballot and binomial bounds, tilts and the Brownian barrier.

The ballot and binomial bounds are checked against exact oracles in
rational arithmetic wherever the inputs allow it.
"""

import math
from fractions import Fraction

import pytest

from src.errors import HypothesisError
from src.oracles.binomial import binomial_exact
from src.oracles.lattice import walk_stay_positive_exact
from src.theory.bounds import (
    ballot_bound_generic,
    ballot_bound_regular,
    ballot_tail_sum,
    binomial_point_bound,
    chernoff_bound,
    q_lower_curve,
    q_upper,
    regular_step_pmf,
    tilt_gamma,
    tilt_nu,
)
from src.theory.brownian import (
    brownian_geometry,
    reflection_density,
    reflection_mass,
    two_line_probability,
)
from src.theory.exponent import EnvelopeMode, ExponentVariant, envelope, g_exponent
from src.theory.horizons import (
    default_fresh_slack,
    default_short_horizon,
    t_lower,
    t_upper,
    x_offset,
)

# ---------------------------------------------------------------------------
# Horizons
# ---------------------------------------------------------------------------


def test_horizons_at_desk_scale():
    assert t_upper(1.0, 10_000, 3) == 827
    assert t_lower(1.0, 10_000, 3) == 929
    assert default_short_horizon(1.0, 10_000) == 464
    assert default_fresh_slack(1.0, 10_000) == pytest.approx(10_000 ** (4 / 15))


def test_x_offset_solves_its_defining_equation():
    n, d, lam, T, k = 10_000, 4, 0.7, 300, 12
    p = (1 + lam * n ** (-1 / 3)) / (d - 1)
    x = x_offset(k, lam, T, d, n)
    assert (T + 2) * p + x == pytest.approx((T + 2 + k + d - 4) / (d - 1))


# ---------------------------------------------------------------------------
# Tail exponent
# ---------------------------------------------------------------------------


def test_g_exponent_known_values():
    assert g_exponent(2, 0, 3) == pytest.approx(2 / 9)
    assert g_exponent(1, 1, 4) == pytest.approx(0.421875)


def test_exponent_variants_agree_at_criticality():
    for A in (0.5, 1.0, 3.0):
        for d in (3, 5, 8):
            assert g_exponent(A, 0, d, ExponentVariant.ABSTRACT) == pytest.approx(
                g_exponent(A, 0, d)
            )


def test_exponent_variants_differ_off_criticality():
    assert g_exponent(1, 1, 4, "abstract") != pytest.approx(g_exponent(1, 1, 4))


def test_exponent_rejects_low_degree():
    with pytest.raises(HypothesisError):
        g_exponent(1, 0, 2)


def test_envelope_max_at_criticality():
    assert envelope(3, 10**6, 3, 0, EnvelopeMode.MAX, 1.0) == pytest.approx(
        0.090909, rel=1e-4
    )


def test_vertex_envelope_scales_with_n():
    a = envelope(1, 1000, 3, 0, "vertex", 1.0)
    b = envelope(1, 8000, 3, 0, "vertex", 1.0)
    assert a / b == pytest.approx(2.0)


def test_envelope_needs_positive_constant():
    with pytest.raises(HypothesisError):
        envelope(1, 1000, 3, 0, EnvelopeMode.MAX, 0.0)


# ---------------------------------------------------------------------------
# q-curves
# ---------------------------------------------------------------------------


def test_q_curves():
    assert q_upper(10, 0.5, 3, 100) == pytest.approx(0.075)
    assert q_lower_curve(10, 0.5, 3, 100, 1.0) == pytest.approx(
        0.5 / 3 * 100 / 200 + 100 ** (4 / 15)
    )


# ---------------------------------------------------------------------------
# Ballot bounds against the exact lattice DP
# ---------------------------------------------------------------------------


def test_generic_ballot_two_point_law_is_tight():
    p = Fraction(1, 2)
    bound = ballot_bound_generic(3, 2, 1, [-1, 1], [1 - p, p])
    assert bound == 2 * p**2 * (1 - p)
    exact = walk_stay_positive_exact(3, 1, {-1: 1 - p, 1: p}, end_at=2)
    assert exact.value == Fraction(1, 4)
    assert bound == exact.value


@pytest.mark.parametrize("p", [Fraction(1, 5), Fraction(1, 2), Fraction(3, 4)])
def test_generic_ballot_dominates_exact(p):
    law = {-1: 1 - p, 1: p}
    for t in range(1, 11):
        for k in range(1, t + 2):
            exact = walk_stay_positive_exact(t, 1, law, end_at=k).value
            assert ballot_bound_generic(t, k, 1, [-1, 1], [1 - p, p]) >= exact


@pytest.mark.parametrize("d", [3, 4, 5])
@pytest.mark.parametrize(
    "p", [Fraction(1, 5), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)]
)
def test_regular_ballot_dominates_exact(d, p):
    law = {-1: 1 - p, d - 2: p}
    for t in range(1, 11):
        for k in range(1, d + t * (d - 2) + 1):
            exact = walk_stay_positive_exact(t, d, law, end_at=k).value
            bound = ballot_bound_regular(t, k, d, p)
            assert bound >= exact, (t, k)


def test_regular_ballot_stays_exact_in_rationals():
    assert isinstance(ballot_bound_regular(5, 3, 4, Fraction(1, 3)), Fraction)
    assert isinstance(ballot_tail_sum(5, 4, Fraction(1, 3), 2), Fraction)


def test_regular_step_pmf_is_a_law():
    total = sum(regular_step_pmf(6, v, 4, Fraction(1, 3)) for v in range(-6, 13))
    assert total == 1
    assert regular_step_pmf(6, 1, 4, Fraction(1, 3)) == 0  # off the lattice


def test_ballot_hypotheses():
    with pytest.raises(HypothesisError):
        ballot_bound_regular(3, 0, 3, 0.5)
    with pytest.raises(HypothesisError):
        ballot_bound_regular(3, 1, 3, 0.0)
    with pytest.raises(HypothesisError):
        ballot_bound_generic(3, 1, 2, [-1, 1], [0.5, 0.5])


# ---------------------------------------------------------------------------
# Binomial bounds
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("N", [50, 100, 200, 400])
@pytest.mark.parametrize("P", [0.2, 0.3, 0.5])
@pytest.mark.parametrize("x", [1.0, 2.0, 5.0, 10.0])
def test_point_bound_dominates_binomial_pmf(N, P, x):
    bound = binomial_point_bound(N, P, x)
    for j in range(math.ceil(N * P + x), N + 1):
        assert binomial_exact(N, P, j) <= bound + 1e-12


def test_point_bound_hypotheses():
    with pytest.raises(HypothesisError):
        binomial_point_bound(10, 0.05, 5.0)  # PN < 1
    with pytest.raises(HypothesisError):
        binomial_point_bound(10, 0.5, 0.1)


def test_chernoff_value():
    assert chernoff_bound(100, 0.5, 10) == pytest.approx(math.exp(-0.9375))


@pytest.mark.parametrize("N, P", [(50, 0.2), (100, 0.5), (400, 0.3)])
def test_chernoff_dominates_binomial_tail(N, P):
    for x in (0.0, 1.0, 3.0, 7.5, 20.0):
        j = math.ceil(N * P + x)
        if j > N:
            continue
        assert binomial_exact(N, P, j, tail=True) <= chernoff_bound(N, P, x) + 1e-12


# ---------------------------------------------------------------------------
# Tilts
# ---------------------------------------------------------------------------


def test_tilt_nu_near_minus_inverse_cube_root():
    n, d, lam = 10**9, 3, 1.0
    p = (1 + lam * n ** (-1 / 3)) / (d - 1)
    nu = tilt_nu(2.5e5, n, p, d)
    assert nu == pytest.approx(-7.4975e-4, rel=1e-3)
    assert abs(nu - (-7.5e-4)) < 1e-6


def test_tilt_gamma_vanishes_at_critical_point():
    for d in (3, 4, 7):
        assert tilt_gamma(1 / (d - 1), d) == pytest.approx(0.0, abs=1e-12)


def test_tilt_hypotheses():
    with pytest.raises(HypothesisError):
        tilt_gamma(1.0, 3)
    with pytest.raises(HypothesisError):
        tilt_nu(0.0, 10, 0.5, 2)


# ---------------------------------------------------------------------------
# Brownian barrier
# ---------------------------------------------------------------------------


def test_reflection_density_value():
    expected = math.exp(0) / math.sqrt(2 * math.pi) * (1 - math.exp(-2))
    assert reflection_density(1, 0, 0, 1, 1) == pytest.approx(expected)
    assert reflection_density(1, 0, 0, 1, 1) == pytest.approx(0.344951, rel=1e-5)


def test_reflection_density_vanishes_on_boundary():
    assert reflection_density(0, 0, 0, 1, 1) == 0
    assert reflection_density(1, 0, 0.5, 2, 1) == 0


def test_reflection_density_below_barrier_raises():
    with pytest.raises(HypothesisError):
        reflection_density(-1, 0, 0, 1, 1)
    with pytest.raises(HypothesisError):
        reflection_density(1, 0, 0, 1, -0.5)


def test_reflection_mass_is_survival_probability():
    # no drift, flat barrier at 0, start at 1: 1 - 2 Phi(-1)
    assert reflection_mass(1, 0, 0, 1, 0) == pytest.approx(math.erf(1 / math.sqrt(2)), rel=1e-6)


def test_brownian_geometry_shapes():
    g = brownian_geometry(1.0, 10**6, 3, 0.1)
    assert g.T == t_lower(1.0, 10**6, 3)
    assert g.T_second == g.T - g.T_prime > 0
    assert g.phi(0.0) < 0
    half = g.T_second / 2
    assert g.ell1(half) == pytest.approx(g.phi(half))
    assert g.ell2(half) == pytest.approx(g.phi(g.T_second))
    # phi is convex, so its chords lie above it
    assert g.ell1(half / 2) >= g.phi(half / 2)
    assert g.I1[0] < g.I1[1] and g.I2[0] < g.I2[1]


def test_two_line_probability_is_a_probability():
    value = two_line_probability(brownian_geometry(1.0, 10**6, 3, 0.1))
    assert -1e-9 <= value <= 1.0


def test_brownian_geometry_rejects_empty_window():
    with pytest.raises(HypothesisError):
        brownian_geometry(0.05, 1000, 3, 0.1)
