"""Limit-theory diagnostics: exact trivial covariances, boundedness verdicts,
order-statistic consistency and CLT shape checks."""

import numpy as np
import pytest

from spectail.asymptotics import (
    clt_normality_check,
    cluster_moment_check,
    degenerate_tail_chain,
    garch_tail_chain,
    limit_covariance_mc,
    os_consistency_check,
    sre_condition_diagnostics,
    tcopula_tail_chain,
)
from spectail.errors import DomainError, UnsupportedLagError
from spectail.estimators import (
    BackwardRatioPower,
    ExceedanceIndicator,
    ForwardRatioIndicator,
    LogExcess,
    OrderStatistic,
    QuantileLevel,
)
from spectail.models import (
    MarkovCopulaSpec,
    SeriesRequest,
    TCopula,
    constant_factor_sre,
    generate,
    iid_pareto_sre,
    lognormal_sre,
)
from spectail.streams import make_stream
from spectail.distributions import student_t_quantile


# ---------------------------------------------------------------------------
# Limit covariance Monte Carlo
# ---------------------------------------------------------------------------

def test_degenerate_chain_exact_constants():
    deg = degenerate_tail_chain(4.0)
    v, se = limit_covariance_mc(deg, ExceedanceIndicator(), ExceedanceIndicator(), n_mc=10**4)
    assert v == 1.0 and se == 0.0
    c, se2 = limit_covariance_mc(deg, ExceedanceIndicator(), LogExcess(), n_mc=10**4)
    assert c == 0.25 and se2 == 0.0  # 1/alpha
    d, _ = limit_covariance_mc(deg, LogExcess(), LogExcess(), n_mc=10**4)
    assert d == 2.0 / 16.0  # 2/alpha^2


def test_covariance_symmetry():
    tc = tcopula_tail_chain(4, 0.25)
    a, sa = limit_covariance_mc(tc, ExceedanceIndicator(), LogExcess(), n_mc=10**5,
                                rng=make_stream(61, ("cov",)))
    b, sb = limit_covariance_mc(tc, LogExcess(), ExceedanceIndicator(), n_mc=10**5,
                                rng=make_stream(62, ("cov",)))
    assert abs(a - b) < 2 * np.hypot(sa, sb)


def test_truncation_stability():
    tc = tcopula_tail_chain(4, 0.25)
    v50, s50 = limit_covariance_mc(tc, ExceedanceIndicator(), ExceedanceIndicator(),
                                   n_mc=2 * 10**5, truncation=50,
                                   rng=make_stream(63, ("cov",)))
    v100, s100 = limit_covariance_mc(tc, ExceedanceIndicator(), ExceedanceIndicator(),
                                     n_mc=2 * 10**5, truncation=100,
                                     rng=make_stream(64, ("cov",)))
    assert abs(v100 - v50) < 3 * np.hypot(s50, s100)


def test_forward_ratio_functionals_and_rejections():
    tc = tcopula_tail_chain(4, 0.25)
    v, se = limit_covariance_mc(tc, ForwardRatioIndicator(1, 1.0),
                                ForwardRatioIndicator(1, 1.0), n_mc=10**5,
                                rng=make_stream(65, ("cov",)))
    assert 0.0 < v < 1.0
    with pytest.raises(UnsupportedLagError):
        limit_covariance_mc(tc, BackwardRatioPower(1, 1.0, 4.0), ExceedanceIndicator())
    with pytest.raises(UnsupportedLagError):
        limit_covariance_mc(tc, ForwardRatioIndicator(-1, 1.0), ExceedanceIndicator())
    with pytest.raises(DomainError):
        limit_covariance_mc(tc, ExceedanceIndicator(s=1.05), ExceedanceIndicator())


def test_garch_chain_variance_positive(ngarch, alpha_ngarch):
    ch = garch_tail_chain(ngarch, alpha_ngarch)
    v, se = limit_covariance_mc(ch, ExceedanceIndicator(), ExceedanceIndicator(),
                                n_mc=5 * 10**4, rng=make_stream(66, ("cov",)))
    assert v > 1.0  # clustering strictly inflates the iid variance


@pytest.mark.slow
def test_limit_variance_matches_simulation(tcop025):
    """The truncated series must match the variance of standardized exceedance
    counts simulated from the actual chain at a deep threshold."""
    limit, lse = limit_covariance_mc(tcopula_tail_chain(4, 0.25),
                                     ExceedanceIndicator(), ExceedanceIndicator(),
                                     n_mc=2 * 10**5, rng=make_stream(67, ("cov",)))
    n, beta, reps = 10**6, 0.9999, 400
    u = student_t_quantile(4, (1 + beta) / 2)
    v = 1 - beta
    req = SeriesRequest(n, 1, 0)
    zs = np.empty(reps)
    for i in range(reps):
        absx = np.abs(generate(tcop025, req, make_stream(68, ("vs", i))).core())
        zs[i] = (np.count_nonzero(absx > u) - n * v) / np.sqrt(n * v)
    var = np.var(zs, ddof=1)
    var_se = var * np.sqrt(2.0 / (reps - 1))
    assert abs(var - limit) < 3 * np.hypot(var_se, lse)


# ---------------------------------------------------------------------------
# Cluster third-moment boundedness
# ---------------------------------------------------------------------------

def test_cluster_iid_ratio_near_one():
    rep = cluster_moment_check(iid_pareto_sre(1.0), (0.999, 0.9999), r=10,
                               epsilon=1e-9, n_mc=4 * 10**6,
                               rng=make_stream(69, ("cl",)))
    ratio = rep.values["ratio"][-1]
    se = rep.values["std_error"][-1]
    assert abs(ratio - 1.0) < 3 * se + 0.05
    assert rep.verdict == "bounded"


def test_cluster_r1_regular_variation(ngarch, alpha_ngarch):
    rep = cluster_moment_check(ngarch, (0.995, 0.999), r=1, epsilon=0.1,
                               n_mc=4 * 10**6, rng=make_stream(70, ("cl",)))
    # with r=1 the ratio estimates v_eps / v -> (1-eps)^(-alpha)
    target = 0.9 ** (-alpha_ngarch)
    assert abs(rep.values["ratio"][-1] - target) / target < 0.10


def test_cluster_ngarch_bounded(ngarch):
    rep = cluster_moment_check(ngarch, (0.99, 0.999, 0.9999), r=10, epsilon=0.1,
                               n_mc=4 * 10**6, rng=make_stream(71, ("cl",)))
    assert rep.verdict == "bounded"


def test_cluster_level_validation(ngarch):
    with pytest.raises(DomainError):
        cluster_moment_check(ngarch, (0.999, 0.99), r=10, epsilon=0.1, n_mc=1000)


# ---------------------------------------------------------------------------
# SRE diagnostics
# ---------------------------------------------------------------------------

def test_sre_rho_lognormal_analytic():
    rep = sre_condition_diagnostics(lognormal_sre(-0.5, 1.0), xi=0.5,
                                    levels=(0.99, 0.999), r=20,
                                    n_mc=2 * 10**6, rng=make_stream(72, ("sre",)))
    rho = rep.values["rho"][0]
    se = rep.values["rho_se"][0]
    assert abs(rho - np.exp(-0.125)) < 3 * se
    assert rep.verdict == "bounded"
    decay = rep.values["fitted_decay"][0]
    assert 0.7 * rho <= decay <= 1.3 * rho


def test_sre_zero_factor_independence():
    rep = sre_condition_diagnostics(constant_factor_sre(0.0), xi=0.5,
                                    levels=(0.99, 0.999), r=10,
                                    n_mc=10**6, alpha=1.0,
                                    rng=make_stream(73, ("sre",)))
    assert rep.values["rho"][0] == 0.0
    # joint exceedances at independent lags equal the marginal probability
    joint = np.array(rep.values["joint_exceedance_deepest"])
    v_eps = np.mean(joint)  # all lags estimate the same marginal value
    assert np.all(np.abs(joint - v_eps) < 6 * np.sqrt(v_eps / 1000 + 1e-12))


def test_sre_xi_validation():
    # xi beyond the tail index pushes rho past 1: the report flags violation
    rep = sre_condition_diagnostics(lognormal_sre(-0.5, 1.0), xi=2.0,
                                    levels=(0.99, 0.999), n_mc=10**5,
                                    rng=make_stream(81, ("sre",)))
    assert rep.verdict == "violated"
    with pytest.raises(DomainError):
        sre_condition_diagnostics(lognormal_sre(-0.5, 1.0), xi=0.5, alpha=0.3,
                                  levels=(0.99, 0.999), n_mc=10**5,
                                  rng=make_stream(82, ("sre",)))


# ---------------------------------------------------------------------------
# Order-statistic consistency
# ---------------------------------------------------------------------------

def test_os_consistency_iid_pareto():
    rep = os_consistency_check(iid_pareto_sre(1.0), (10**5,), lambda n: 1000,
                               reps=100, rng=make_stream(74, ("os",)))
    mean = rep.values["mean_ratio"][0]
    assert 0.97 <= mean <= 1.03
    assert rep.verdict == "bounded"


def test_os_consistency_ngarch_grid(ngarch, garch_quantiles):
    quantiles = {}
    for n in (2000, 8000, 32000):
        k = int(n**0.7)
        beta = 1.0 - k / n
        from spectail.truth import marginal_quantile

        quantiles[beta] = marginal_quantile(
            ngarch, beta, m=10**6, repetitions=10,
            rng=make_stream(75, ("osq", n)),
        ).value
    rep = os_consistency_check(ngarch, (2000, 8000, 32000), lambda n: int(n**0.7),
                               reps=60, rng=make_stream(76, ("os",)), quantiles=quantiles)
    sds = rep.values["sd_ratio"]
    assert sds[0] > sds[1] > sds[2]
    assert rep.verdict == "bounded"


def test_os_consistency_rejects_non_intermediate(ngarch):
    with pytest.raises(DomainError):
        os_consistency_check(ngarch, (2000,), lambda n: 1999, reps=5)


# ---------------------------------------------------------------------------
# CLT normality
# ---------------------------------------------------------------------------

def test_clt_forward_tcopula(tcop025):
    from spectail.truth import preasymptotic

    target = preasymptotic(tcop025, beta=0.9, t=1, x=0.5, path_length=2 * 10**6,
                           repetitions=4, rng=make_stream(77, ("clt-t",))).p
    rep = clt_normality_check(tcop025, n=2000, threshold=OrderStatistic(200),
                              reps=1000, target=target, kind="forward", t=1, x=0.5,
                              rng=make_stream(78, ("clt",)))
    assert rep.values["ks_to_fitted_normal"][0] < 0.08
    assert rep.verdict == "bounded"


def test_clt_hill_iid_pareto_variance():
    rep = clt_normality_check(iid_pareto_sre(4.0), n=20000, threshold=OrderStatistic(1000),
                              reps=400, target=4.0, kind="hill",
                              rng=make_stream(79, ("clt",)))
    var = rep.values["variance"][0]
    assert abs(var - 16.0) / 16.0 < 0.25  # classical limit alpha^2


def test_clt_tq_and_os_same_distribution(tcop025):
    from spectail.distributions import student_t_quantile as q

    resolver = lambda beta: q(4.0, (1.0 + beta) / 2.0)
    rep_os = clt_normality_check(tcop025, n=2000, threshold=OrderStatistic(200),
                                 reps=1000, target=0.0, kind="forward", t=1, x=0.5,
                                 rng=make_stream(80, ("clt",)))
    rep_tq = clt_normality_check(tcop025, n=2000, threshold=QuantileLevel(0.9, resolver),
                                 reps=1000, target=0.0, kind="forward", t=1, x=0.5,
                                 rng=make_stream(80, ("clt",)))
    from scipy.stats import ks_2samp

    a = np.array(rep_os.values["sample"])
    b = np.array(rep_tq.values["sample"])
    assert ks_2samp(a, b).statistic < 0.08
