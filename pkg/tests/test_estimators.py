"""Estimator tests: hand enumerations are exact, identities are bit-exact."""

import math

import numpy as np
import pytest

from spectail.errors import DomainError, NoExceedancesError, UnsupportedLagError
from spectail.estimators import (
    BackwardRatioPower,
    Deterministic,
    ExceedanceIndicator,
    ExceedanceSet,
    ForwardRatioIndicator,
    LogExcess,
    OrderStatistic,
    QuantileLevel,
    backward_cdf,
    forward_cdf,
    hill_alpha,
    resolve_threshold,
    tail_array_sum,
)
from spectail.models import GarchSpec, SeriesRequest, TimeSeries, generate_garch, lognormal_sre, generate_sre
from spectail.streams import make_stream

HAND = TimeSeries(np.array([5.0, 10.0, 1.0, 8.0, 2.0, 9.0, 4.0]), n=5, max_lag=1, model="hand")
HAND_EXC = resolve_threshold(HAND, Deterministic(7.0))


# ---------------------------------------------------------------------------
# Threshold resolution
# ---------------------------------------------------------------------------

def test_order_statistic_enumeration():
    s = TimeSeries(np.array([0.0, 5, 1, 4, 2, 3, 0.0]), n=5, max_lag=1, model="t")
    exc = resolve_threshold(s, OrderStatistic(2))
    assert exc.threshold_value == 3.0
    assert list(exc.indices) == [1, 3]
    assert exc.count == 2


def test_deterministic_enumeration():
    s = TimeSeries(np.array([0.0, 5, 1, 4, 2, 3, 0.0]), n=5, max_lag=1, model="t")
    exc = resolve_threshold(s, Deterministic(4.5))
    assert list(exc.indices) == [1]


def test_threshold_above_max_gives_empty_set():
    s = TimeSeries(np.array([0.0, 5, 1, 4, 2, 3, 0.0]), n=5, max_lag=1, model="t")
    exc = resolve_threshold(s, Deterministic(100.0))
    assert exc.count == 0


def test_order_statistic_k_too_large():
    s = TimeSeries(np.zeros(7) + 1.0, n=5, max_lag=1, model="t")
    with pytest.raises(DomainError):
        resolve_threshold(s, OrderStatistic(5))


def test_quantile_level_resolver():
    s = TimeSeries(np.array([0.0, 5, 1, 4, 2, 3, 0.0]), n=5, max_lag=1, model="t")
    exc = resolve_threshold(s, QuantileLevel(0.9, resolver=lambda b: 4.5))
    assert list(exc.indices) == [1]
    with pytest.raises(DomainError):
        resolve_threshold(s, QuantileLevel(0.9))


def test_strict_exceedance_at_threshold():
    s = TimeSeries(np.array([0.0, 5, 1, 4, 4.5, 3, 0.0]), n=5, max_lag=1, model="t")
    exc = resolve_threshold(s, Deterministic(4.5))
    assert list(exc.indices) == [1]  # the point equal to the threshold is excluded


# ---------------------------------------------------------------------------
# Point estimators: frozen hand examples
# ---------------------------------------------------------------------------

def test_forward_hand_example_exact():
    rec = forward_cdf(HAND, 1, 0.3, HAND_EXC)
    assert rec.estimate == 2.0 / 3.0
    assert rec.exceedance_count == 3


def test_forward_extremes():
    assert forward_cdf(HAND, 1, 10.0, HAND_EXC).estimate == 1.0
    assert forward_cdf(HAND, 1, -10.0, HAND_EXC).estimate == 0.0


def test_backward_hand_example_exact():
    rec = backward_cdf(HAND, 1, 0.3, HAND_EXC, alpha_hat=1.0)
    expected = 1.0 - (0.5 + 0.125 + 2.0 / 9.0) / 3.0
    assert abs(rec.estimate - expected) < 1e-12


def test_backward_x_huge_gives_one():
    rec = backward_cdf(HAND, 1, 1e12, HAND_EXC, alpha_hat=1.0)
    assert rec.estimate == 1.0


def test_backward_alpha_to_zero_limit():
    # all back-ratios positive and indicators true at x=0: weights -> 1
    rec = backward_cdf(HAND, 1, 0.0, HAND_EXC, alpha_hat=1e-12)
    assert abs(rec.estimate - 0.0) < 1e-9
    with pytest.raises(DomainError):
        backward_cdf(HAND, 1, 0.0, HAND_EXC, alpha_hat=0.0)


def test_backward_zero_predecessor_contributes_nothing():
    vals = np.array([0.0, 10.0, 0.0, 8.0, 2.0, 9.0, 4.0])  # X_2 = 0
    s = TimeSeries(vals, n=5, max_lag=1, model="z")
    exc = resolve_threshold(s, Deterministic(7.0))
    rec = backward_cdf(s, 1, 0.3, exc, alpha_hat=1.0)
    # i=1: X_0=0 contributes 0; i=3: X_2=0 contributes 0; i=5: 2/9 survives
    assert abs(rec.estimate - (1.0 - (2.0 / 9.0) / 3.0)) < 1e-12


def test_hill_hand_examples():
    u = 2.0
    s = TimeSeries(np.array([0.0, u * math.e, u * math.e, 0.0]), n=2, max_lag=1, model="h")
    assert hill_alpha(s, ExceedanceSet(u, np.array([1, 2]))) == 1.0
    s2 = TimeSeries(np.array([0.0, 2.0, 4.0, 0.0]), n=2, max_lag=1, model="h")
    got = hill_alpha(s2, ExceedanceSet(1.0, np.array([1, 2])))
    assert abs(got - 2.0 / (3.0 * math.log(2.0))) < 1e-12


def test_hill_on_iid_pareto():
    from spectail.models import iid_pareto_sre

    s = generate_sre(iid_pareto_sre(4.0), SeriesRequest(10**5, 1, 0), make_stream(21, ("h",)))
    exc = resolve_threshold(s, OrderStatistic(1000))
    alpha = hill_alpha(s, exc)
    assert abs(alpha - 4.0) < 3 * 4.0 / math.sqrt(1000)


def test_errors_on_empty_and_bad_lags():
    empty = ExceedanceSet(100.0, np.array([], dtype=np.int64))
    with pytest.raises(NoExceedancesError):
        forward_cdf(HAND, 1, 0.5, empty)
    with pytest.raises(NoExceedancesError):
        hill_alpha(HAND, empty)
    with pytest.raises(UnsupportedLagError):
        forward_cdf(HAND, 2, 0.5, HAND_EXC)  # max_lag = 1
    with pytest.raises(UnsupportedLagError):
        forward_cdf(HAND, 0, 0.5, HAND_EXC)


def test_forward_step_function_properties():
    s = generate_garch(GarchSpec(0.1, 0.14, 0.84), SeriesRequest(500, 3, 200), make_stream(22, ("f",)))
    exc = resolve_threshold(s, OrderStatistic(50))
    xs = np.linspace(-3, 3, 101)
    vals = [forward_cdf(s, 1, float(x), exc).estimate for x in xs]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert all(abs(v * exc.count - round(v * exc.count)) < 1e-9 for v in vals)


# ---------------------------------------------------------------------------
# Tail array sums
# ---------------------------------------------------------------------------

def test_phi1_counts_exceedances():
    got = tail_array_sum(HAND, ExceedanceIndicator(1.0), u_n=7.0)
    assert got == 3.0


def test_phi0_single_log():
    u = 2.0
    s = TimeSeries(np.array([0.0, u * math.e, 0.1, 0.0]), n=2, max_lag=1, model="h")
    got = tail_array_sum(s, LogExcess(1.0), u_n=u)
    assert abs(got - 1.0) < 1e-12


def test_forward_identity_bit_exact():
    for seed in range(20):
        s = generate_garch(
            GarchSpec(0.1, 0.14, 0.84), SeriesRequest(400, 2, 100), make_stream(23, ("id", seed))
        )
        u_n = float(np.quantile(np.abs(s.core()), 0.9))
        for sv in (0.95, 1.0, 1.05):
            exc = resolve_threshold(s, Deterministic(sv * u_n))
            if exc.count == 0:
                continue
            s1 = tail_array_sum(s, ExceedanceIndicator(sv), u_n)
            s2 = tail_array_sum(s, ForwardRatioIndicator(1, 0.5, sv), u_n)
            direct = forward_cdf(s, 1, 0.5, exc).estimate
            assert (s1 - s2) / s1 == direct


def test_hill_identity_bit_exact():
    for seed in range(20):
        s = generate_garch(
            GarchSpec(0.1, 0.14, 0.84), SeriesRequest(400, 2, 100), make_stream(24, ("id", seed))
        )
        u_n = float(np.quantile(np.abs(s.core()), 0.9))
        for sv in (0.95, 1.0, 1.05):
            exc = resolve_threshold(s, Deterministic(sv * u_n))
            if exc.count == 0:
                continue
            s1 = tail_array_sum(s, ExceedanceIndicator(sv), u_n)
            s0 = tail_array_sum(s, LogExcess(sv), u_n)
            assert s1 / s0 == hill_alpha(s, exc)


def test_backward_branch_consistency_at_zero():
    for seed in range(10):
        s = generate_garch(
            GarchSpec(0.1, 0.14, 0.84), SeriesRequest(300, 2, 100), make_stream(25, ("b", seed))
        )
        exc = resolve_threshold(s, OrderStatistic(30))
        alpha = hill_alpha(s, exc)
        upper = backward_cdf(s, 1, 0.0, exc, alpha).estimate
        lower = backward_cdf(s, 1, -1e-300, exc, alpha).estimate
        pos = exc.indices + s.max_lag - 1
        prev, cur = s.values[pos - 1], s.values[pos]
        nz = prev != 0
        mass = np.sum(np.abs(prev[nz] / cur[nz]) ** alpha) / exc.count
        assert abs((1.0 - upper) + lower - mass) < 1e-12


def test_phi3_on_nonnegative_series_matches_backward():
    s = generate_sre(lognormal_sre(), SeriesRequest(500, 2, 100), make_stream(26, ("p3",)))
    u_n = float(np.quantile(s.core(), 0.9))
    exc = resolve_threshold(s, Deterministic(u_n))
    alpha = hill_alpha(s, exc)
    num = tail_array_sum(s, BackwardRatioPower(1, 0.5, alpha, 1.0), u_n)
    den = tail_array_sum(s, ExceedanceIndicator(1.0), u_n)
    direct = backward_cdf(s, 1, 0.5, exc, alpha).estimate
    assert abs((1.0 - num / den) - direct) < 1e-12


def test_tail_array_sum_margin_validation():
    with pytest.raises(DomainError):
        tail_array_sum(HAND, ExceedanceIndicator(0.8), u_n=7.0, epsilon=0.1)
    with pytest.raises(DomainError):
        tail_array_sum(HAND, ExceedanceIndicator(1.2000001), u_n=7.0, epsilon=0.2)


# ---------------------------------------------------------------------------
# Scale invariance (power-of-two factors keep floating point exact)
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("c", [2.0**-8, 0.5, 2.0, 2.0**9])
def test_scale_invariance_exact(c):
    s = generate_garch(GarchSpec(0.1, 0.14, 0.84), SeriesRequest(400, 2, 100), make_stream(27, ("sc",)))
    scaled = TimeSeries(s.values * c, s.n, s.max_lag, s.model)
    exc = resolve_threshold(s, OrderStatistic(40))
    exc_c = resolve_threshold(scaled, OrderStatistic(40))
    assert hill_alpha(s, exc) == hill_alpha(scaled, exc_c)
    assert forward_cdf(s, 1, 0.7, exc).estimate == forward_cdf(scaled, 1, 0.7, exc_c).estimate
    a = hill_alpha(s, exc)
    assert (
        backward_cdf(s, 1, 0.7, exc, a).estimate
        == backward_cdf(scaled, 1, 0.7, exc_c, a).estimate
    )
