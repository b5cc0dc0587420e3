import itertools
import math

import pytest
import scipy.special
import scipy.stats
from hypothesis import given, settings, strategies as st

from unfair_dice.chi2_analysis import (
    BinPattern,
    Chi2Plan,
    bias_sums,
    chi2_cdf,
    chi2_critical,
    chi2_sf,
    chi2_statistic,
    expected_chi2_at_N,
    expected_N,
    gammainc_lower,
    gammainc_upper,
    histogram_moment,
    wilson_hilferty_critical,
)
from unfair_dice.errors import ConfigError, CountMismatch, FairCoin


@pytest.mark.parametrize("a", [0.5, 1.0, 1.5, 3.5, 10.0, 127.5])
@pytest.mark.parametrize("x", [1e-6, 0.3, 1.0, 2.5, 9.0, 40.0, 200.0])
def test_incomplete_gamma_against_scipy(a, x):
    assert gammainc_lower(a, x) == pytest.approx(scipy.special.gammainc(a, x), rel=1e-12, abs=1e-15)
    assert gammainc_upper(a, x) == pytest.approx(scipy.special.gammaincc(a, x), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("df, table", [(1, 3.8415), (3, 7.8147), (7, 14.067)])
def test_published_critical_values(df, table):
    c = chi2_critical(df, 0.05)
    assert c == pytest.approx(table, abs=1e-3)
    assert c == pytest.approx(wilson_hilferty_critical(df, 0.05), rel=0.03)


@pytest.mark.parametrize("df", [1, 2, 3, 7, 15, 255, 1023])
@pytest.mark.parametrize("alpha", [1e-9, 0.01, 0.05, 0.5, 0.9, 0.999])
def test_quantile_round_trip(df, alpha):
    c = chi2_critical(df, alpha)
    assert chi2_sf(c, df) == pytest.approx(alpha, abs=1e-10)
    assert abs(chi2_cdf(c, df) - (1 - alpha)) <= 1e-9
    assert c == pytest.approx(scipy.stats.chi2.isf(alpha, df), rel=1e-9)


def test_quantile_limit_near_one():
    assert chi2_critical(1, 1 - 1e-9) < 1e-17
    with pytest.raises(ConfigError):
        chi2_critical(1, 1.0)
    with pytest.raises(ConfigError):
        chi2_critical(0, 0.05)


def test_plan():
    plan = Chi2Plan(3, 0.01)
    assert plan.df == 7 and plan.bins == 8
    assert chi2_sf(plan.crit, plan.df) == pytest.approx(0.01, abs=1e-10)
    with pytest.raises(ConfigError):
        Chi2Plan(0, 0.05)


def test_statistic_examples():
    assert chi2_statistic([5, 5, 5, 5], 20) == 0.0
    assert chi2_statistic([2, 0], 2) == 2.0
    with pytest.raises(CountMismatch):
        chi2_statistic([1, 2], 4)


@given(st.lists(st.integers(0, 500), min_size=2, max_size=16).filter(lambda h: sum(h) > 0))
def test_statistic_against_direct_sum(hist):
    N = sum(hist)
    E = N / len(hist)
    direct = math.fsum((o - E) ** 2 / E for o in hist)
    assert chi2_statistic(hist, N) == pytest.approx(direct, rel=1e-12, abs=1e-12)
    assert (chi2_statistic(hist, N) == 0) == (len(set(hist)) == 1)


def enumerate_moment(order, N, b, j, p0):
    """E[H^order] for bin j by summing over all 2**(bN) flip sequences."""
    p1 = 1 - p0
    total = []
    for flips in itertools.product((0, 1), repeat=b * N):
        prob = math.prod(p1 if f else p0 for f in flips)
        samples = [int("".join(map(str, flips[i * b : (i + 1) * b])), 2) for i in range(N)]
        total.append(prob * samples.count(j) ** order)
    return math.fsum(total)


def test_moment_examples():
    assert histogram_moment(1, 10, BinPattern(3, 2), 0.4, 0.6) == pytest.approx(3.6, abs=1e-12)
    assert histogram_moment(2, 2, BinPattern(1, 1), 0.5, 0.5) == pytest.approx(1.5, abs=1e-15)
    pat = BinPattern(5, 3)
    s = pat.probability(0.3, 0.7)
    for order in (1, 2, 3, 4):
        assert histogram_moment(order, 1, pat, 0.3, 0.7) == pytest.approx(s, abs=1e-15)


@pytest.mark.parametrize("b", [1, 2])
@pytest.mark.parametrize("p0", [0.3, 0.5, 0.7])
def test_moments_against_enumeration(b, p0):
    for N in range(1, 5):
        for j in range(2**b):
            for order in (1, 2, 3, 4):
                exact = enumerate_moment(order, N, b, j, p0)
                got = histogram_moment(order, N, BinPattern(j, b), p0, 1 - p0)
                assert got == pytest.approx(exact, abs=1e-12, rel=1e-12)


def test_falling_factorial_terms_vanish():
    pat = BinPattern(0, 1)
    # at N=2 only the N and N(N-1) terms survive
    s = 0.4
    assert histogram_moment(4, 2, pat, 0.4, 0.6) == pytest.approx(2 * s + 7 * 2 * s**2, abs=1e-15)


def test_expected_statistic_examples():
    plan1 = Chi2Plan(1, 0.05)
    for N in (1, 7, 1000):
        assert expected_chi2_at_N(plan1, 0.5, N) == pytest.approx(1.0, abs=1e-15)
    assert expected_chi2_at_N(plan1, 0.6, 100) == pytest.approx(4.96, abs=1e-12)


@pytest.mark.parametrize("b", [1, 2, 3])
@pytest.mark.parametrize("p0", [0.2, 0.5, 0.55, 0.9])
def test_expected_statistic_from_moments(b, p0):
    plan = Chi2Plan(b, 0.05)
    k = 2**b
    for N in (1, 3, 50):
        per_bin = []
        for j in range(k):
            pat = BinPattern(j, b)
            m1 = histogram_moment(1, N, pat, p0, 1 - p0)
            m2 = histogram_moment(2, N, pat, p0, 1 - p0)
            per_bin.append(k / N * m2 - 2 * m1 + N / k)
        assert expected_chi2_at_N(plan, p0, N) == pytest.approx(math.fsum(per_bin), abs=1e-12, rel=1e-12)


def test_expected_N_examples():
    plan = Chi2Plan(1, 0.05)
    en = expected_N(plan, 0.6)
    assert en == pytest.approx((plan.crit + 0.04 - 1) / 0.04, rel=1e-12)
    assert en == pytest.approx(72.04, abs=0.01)
    with pytest.raises(FairCoin):
        expected_N(plan, 0.5)


@settings(deadline=None)
@given(st.integers(1, 8), st.sampled_from([0.05, 0.01, 0.001]), st.floats(0.01, 0.99).filter(lambda p: abs(p - 0.5) > 1e-3))
def test_expected_N_round_trip(b, alpha, p0):
    plan = Chi2Plan(b, alpha)
    en = expected_N(plan, p0)
    assert en > 0
    assert expected_chi2_at_N(plan, p0, en) == pytest.approx(plan.crit, abs=1e-9)


@given(st.integers(1, 10), st.floats(0.01, 0.99).filter(lambda p: abs(p - 0.5) > 1e-3))
def test_symmetry_and_slope(b, p0):
    plan = Chi2Plan(b, 0.05)
    s2, s_half = bias_sums(b, p0)
    t2, t_half = bias_sums(b, 1 - p0)
    assert s2 == pytest.approx(t2, rel=1e-9, abs=1e-300)
    assert s_half == pytest.approx(t_half, rel=1e-9)
    assert expected_N(plan, p0) == pytest.approx(expected_N(plan, 1 - p0), rel=1e-9)
    slope = expected_chi2_at_N(plan, p0, 2.0) - expected_chi2_at_N(plan, p0, 1.0)
    assert slope == pytest.approx(2**b * s2, rel=1e-6, abs=1e-12)
    assert s2 > 0


@pytest.mark.parametrize("b", [1, 2, 3, 5])
def test_expected_N_decreases_with_bias(b):
    plan = Chi2Plan(b, 0.05)
    ens = [expected_N(plan, 0.5 + d) for d in (0.01, 0.05, 0.1, 0.2, 0.3, 0.45)]
    assert all(b2 < a for a, b2 in zip(ens, ens[1:]))


def test_b_limit():
    with pytest.raises(ConfigError):
        bias_sums(65, 0.3)
