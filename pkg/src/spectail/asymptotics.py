"""Numerical checks of the limit theory behind the estimators.

The limit of the standardized estimation errors is a Gaussian process indexed
by tail functionals; its covariances are series of expectations over the tail
process ``Y_k = R * Theta_k`` with ``R`` standard Pareto independent of the
spectral chain.  :func:`limit_covariance_mc` samples the chain and integrates
the Pareto coordinate analytically, so degenerate chains produce the exact
constants and the truncated series inherits the chain's geometric decay.

The remaining checks turn asymptotic statements into finite-sample verdicts
with explicit decision rules: third-moment boundedness of exceedance
clusters, geometric decay of joint exceedance probabilities for affine
recursions, consistency of intermediate order statistics, and normality of
standardized estimation errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats as _scipy_stats

from .distributions import TiltedInnovationSpec, sample_innovation, sample_tilted_innovation
from .errors import DomainError, NoExceedancesError, UnsupportedLagError
from .estimators import (
    ExceedanceIndicator,
    ForwardRatioIndicator,
    LogExcess,
    OrderStatistic,
    QuantileLevel,
    TailFunctional,
    backward_cdf,
    forward_cdf,
    hill_alpha,
    resolve_threshold,
)
from .models import GarchSpec, ModelSpec, SeriesRequest, SreSpec, generate, recommended_burn_in
from .streams import make_stream
from .truth import marginal_quantile, sre_tail_index

__all__ = [
    "TailProcessSampler",
    "ConditionReport",
    "tcopula_tail_chain",
    "garch_tail_chain",
    "degenerate_tail_chain",
    "limit_covariance_mc",
    "cluster_moment_check",
    "sre_condition_diagnostics",
    "os_consistency_check",
    "clt_normality_check",
]

_DEFAULT_SEED = 0xA5E55


# ---------------------------------------------------------------------------
# Tail process samplers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailProcessSampler:
    """Sampler of the forward spectral chain ``Theta_0..Theta_K`` (|Theta_0| = 1)."""

    alpha: float
    chain: Callable[[np.random.Generator, int, int], np.ndarray]
    name: str = "chain"

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError("tail index must be positive")


def tcopula_tail_chain(nu: float, rho: float) -> TailProcessSampler:
    """Multiplicative forward chain of the t-copula model; tail index ``nu``."""
    if not -1.0 < rho < 1.0:
        raise DomainError(f"correlation must lie in (-1,1), got {rho}")
    c = float(np.sqrt((1.0 - rho * rho) / (nu + 1.0)))

    def chain(rng: np.random.Generator, n_paths: int, length: int) -> np.ndarray:
        th = np.empty((n_paths, length))
        th[:, 0] = rng.integers(0, 2, n_paths) * 2.0 - 1.0
        for k in range(1, length):
            th[:, k] = th[:, k - 1] * (rho + c * rng.standard_t(nu + 1.0, n_paths))
        return th

    return TailProcessSampler(alpha=float(nu), chain=chain, name=f"tcop-r{rho:g}")


def garch_tail_chain(spec: GarchSpec, alpha: float) -> TailProcessSampler:
    """Forward spectral chain of GARCH(1,1) from the tilted-innovation products."""
    tilted = TiltedInnovationSpec(spec.innovation, alpha)

    def chain(rng: np.random.Generator, n_paths: int, length: int) -> np.ndarray:
        th = np.empty((n_paths, length))
        e0 = sample_tilted_innovation(tilted, n_paths, rng)
        th[:, 0] = np.sign(e0)
        growth = np.sqrt(spec.alpha1 * e0 * e0 + spec.beta1)
        inv_abs_e0 = 1.0 / np.abs(e0)
        for k in range(1, length):
            ek = sample_innovation(spec.innovation, n_paths, rng)
            th[:, k] = ek * inv_abs_e0 * growth
            growth = growth * np.sqrt(spec.alpha1 * ek * ek + spec.beta1)
        return th

    return TailProcessSampler(alpha=float(alpha), chain=chain, name=spec.label)


def degenerate_tail_chain(alpha: float) -> TailProcessSampler:
    """Chain that dies immediately (iid-like extremes): Theta_k = 0 for k >= 1."""

    def chain(rng: np.random.Generator, n_paths: int, length: int) -> np.ndarray:
        th = np.zeros((n_paths, length))
        th[:, 0] = rng.integers(0, 2, n_paths) * 2.0 - 1.0
        return th

    return TailProcessSampler(alpha=float(alpha), chain=chain, name="degenerate")


# ---------------------------------------------------------------------------
# Condition reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionReport:
    """Measured values over a probe grid plus a rule-derived verdict."""

    quantity: str
    grid: dict[str, tuple]
    values: dict[str, tuple]
    verdict: str  # "bounded" | "growing" | "inconclusive" | "violated"
    growth_exponent: float | None
    rule: str


def _loglog_slope(vs: np.ndarray, ratios: np.ndarray) -> float:
    mask = (vs > 0) & (ratios > 0)
    if np.count_nonzero(mask) < 2:
        return float("nan")
    return float(np.polyfit(np.log(vs[mask]), np.log(ratios[mask]), 1)[0])


# ---------------------------------------------------------------------------
# Limit covariance Monte Carlo
# ---------------------------------------------------------------------------

def _h0_kind(psi: TailFunctional) -> str:
    # factor of psi(Y-window at position 0) that depends on the Pareto radius
    return "logR" if isinstance(psi, LogExcess) else "one"


def _hk_kind(psi: TailFunctional) -> str:
    # radius-dependent factor at position k >= 0
    return "logplus" if isinstance(psi, LogExcess) else "ind"


def _validate_limit_functional(psi: TailFunctional) -> int:
    """Returns the forward lag the functional looks ahead (0 for radius-only)."""
    if isinstance(psi, (LogExcess, ExceedanceIndicator)):
        if psi.s != 1.0:
            raise DomainError("limit functionals are evaluated at s = 1")
        return 0
    if isinstance(psi, ForwardRatioIndicator):
        if psi.s != 1.0:
            raise DomainError("limit functionals are evaluated at s = 1")
        if psi.t < 1:
            raise UnsupportedLagError(
                "functionals depending on negative lags need the backward chain, "
                "which the forward samplers do not provide"
            )
        return psi.t
    raise UnsupportedLagError(
        "backward-power functionals need the backward chain; not supported"
    )


def _fpart(psi: TailFunctional, theta: np.ndarray, k: int) -> np.ndarray | float:
    """Radius-free factor of psi evaluated at chain position k."""
    if not isinstance(psi, ForwardRatioIndicator):
        return 1.0
    base = theta[:, k]
    ahead = theta[:, k + psi.t]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(base != 0.0, ahead / np.abs(base), np.nan)
    return np.where(np.isnan(ratio), 0.0, (ratio > psi.x).astype(float))


def _pareto_pair(h0: str, hk: str, theta_k: np.ndarray, alpha: float) -> np.ndarray:
    """E over the Pareto radius of h0(R) * hk(R * theta_k), elementwise in theta_k.

    Closed forms with w = min(1, theta^alpha), L = log+(1/theta), P = log+(theta):
      (one,  ind)      w
      (logR, ind)      w * (1/alpha + L)
      (one,  logplus)  w / alpha + P
      (logR, logplus)  w * (2/alpha^2 + L/alpha) + P/alpha
    """
    th = np.maximum(np.abs(theta_k), 0.0)
    pos = th > 0.0
    w = np.zeros_like(th)
    L = np.zeros_like(th)
    P = np.zeros_like(th)
    w[pos] = np.minimum(1.0, th[pos] ** alpha)
    with np.errstate(divide="ignore"):
        logs = np.log(th[pos])
    L[pos] = np.maximum(-logs, 0.0)
    P[pos] = np.maximum(logs, 0.0)
    if h0 == "one" and hk == "ind":
        return w
    if h0 == "logR" and hk == "ind":
        return w * (1.0 / alpha + L)
    if h0 == "one" and hk == "logplus":
        return w / alpha + P
    return w * (2.0 / alpha**2 + L / alpha) + P / alpha


def limit_covariance_mc(
    sampler: TailProcessSampler,
    psi1: TailFunctional,
    psi2: TailFunctional,
    n_mc: int = 10**5,
    truncation: int = 50,
    rng: np.random.Generator | None = None,
    chunk: int = 200_000,
) -> tuple[float, float]:
    """Covariance of the limit Gaussian process at two tail functionals.

    Monte Carlo over the spectral chain with the Pareto radius integrated in
    closed form; the lag series is truncated at ``truncation``.  Returns
    ``(estimate, std_error)``.
    """
    t1 = _validate_limit_functional(psi1)
    t2 = _validate_limit_functional(psi2)
    rng = rng if rng is not None else make_stream(_DEFAULT_SEED, ("limit-cov", sampler.name))
    alpha = sampler.alpha
    length = truncation + max(t1, t2) + 1
    total = 0.0
    total_sq = 0.0
    count = 0
    remaining = n_mc
    while remaining > 0:
        size = min(chunk, remaining)
        theta = sampler.chain(rng, size, length)
        if np.any(np.abs(np.abs(theta[:, 0]) - 1.0) > 1e-12):
            raise DomainError("chain must start with |Theta_0| = 1")
        f1_0 = _fpart(psi1, theta, 0)
        f2_0 = _fpart(psi2, theta, 0)
        # k = 0 term: both functionals sit on the same window
        draws = f1_0 * f2_0 * _pareto_pair(
            _h0_kind(psi1), _hk_kind(psi2), theta[:, 0], alpha
        )
        for k in range(1, truncation + 1):
            tk = theta[:, k]
            draws = draws + f1_0 * _fpart(psi2, theta, k) * _pareto_pair(
                _h0_kind(psi1), _hk_kind(psi2), tk, alpha
            )
            draws = draws + f2_0 * _fpart(psi1, theta, k) * _pareto_pair(
                _h0_kind(psi2), _hk_kind(psi1), tk, alpha
            )
        total += float(np.sum(draws))
        total_sq += float(np.sum(draws * draws))
        count += size
        remaining -= size
    mean = total / count
    var = max(total_sq / count - mean * mean, 0.0)
    return mean, float(np.sqrt(var / count))


# ---------------------------------------------------------------------------
# Cluster moment boundedness
# ---------------------------------------------------------------------------

def cluster_moment_check(
    model: ModelSpec,
    levels: tuple[float, ...],
    r: int = 10,
    epsilon: float = 0.1,
    n_mc: int = 10**6,
    rng: np.random.Generator | None = None,
) -> ConditionReport:
    """Third moment of block exceedance counts relative to ``r * v``.

    For each quantile level the path is cut into blocks of length ``r`` and
    ``E[(sum_i 1{X_i > (1-eps) u})^3] / (r v)`` is estimated; boundedness as
    the level deepens is judged from the log-log slope against ``v``.
    """
    if len(levels) < 2 or any(not 0.0 < b < 1.0 for b in levels) or sorted(levels) != list(levels):
        raise DomainError("levels must be an increasing tuple inside (0,1)")
    if r < 1:
        raise DomainError("block length must be >= 1")
    rng = rng if rng is not None else make_stream(_DEFAULT_SEED, ("cluster", model.label))
    req = SeriesRequest(n=n_mc, max_lag=1, burn_in=recommended_burn_in(model))
    absx = generate(model, req, rng).abs_core()
    m = n_mc // r
    trimmed = absx[: m * r].reshape(m, r)
    vs, ratios, ses, nonzero = [], [], [], []
    for beta in levels:
        u = float(np.quantile(absx, beta))
        u_eps = (1.0 - epsilon) * u
        v = float(np.mean(absx > u))
        s = np.count_nonzero(trimmed > u_eps, axis=1).astype(float)
        cubes = s**3
        ratio = float(np.mean(cubes) / (r * v))
        se = float(np.std(cubes) / np.sqrt(m) / (r * v))
        vs.append(v)
        ratios.append(ratio)
        ses.append(se)
        nonzero.append(int(np.count_nonzero(s)))
    slope = _loglog_slope(np.asarray(vs), np.asarray(ratios))
    if nonzero[-1] < 10:
        verdict = "inconclusive"
    elif np.isnan(slope):
        verdict = "inconclusive"
    else:
        verdict = "bounded" if slope >= -0.1 else "growing"
    return ConditionReport(
        quantity="cluster_third_moment_ratio",
        grid={"level": tuple(levels), "v": tuple(vs)},
        values={"ratio": tuple(ratios), "std_error": tuple(ses), "nonzero_blocks": tuple(nonzero)},
        verdict=verdict,
        growth_exponent=None if np.isnan(slope) else slope,
        rule="bounded iff log-log slope of ratio against v is >= -0.1 "
             "and at least 10 nonzero blocks at the deepest level",
    )


# ---------------------------------------------------------------------------
# SRE condition diagnostics
# ---------------------------------------------------------------------------

def sre_condition_diagnostics(
    spec: SreSpec,
    xi: float,
    levels: tuple[float, ...],
    r: int = 20,
    epsilon: float = 0.1,
    n_mc: int = 10**6,
    delta: float = 0.5,
    alpha: float | None = None,
    rng: np.random.Generator | None = None,
) -> ConditionReport:
    """Moment constant, joint-exceedance decay and power-sum bound for an SRE.

    Reports the Monte Carlo estimate of ``rho = E[C^xi]`` (< 1 required), the
    conditional probabilities ``P(min(X_j, X_k) > u_eps | X_0 > u_eps)`` on a
    ``(1, k)`` grid with a fitted geometric decay rate, and the tail-product
    power sums whose boundedness the theory requires.  ``alpha`` overrides the
    moment-equation tail index (needed when the multiplier is degenerate and
    the Kesten equation has no root).
    """
    if not xi > 0:
        raise DomainError("xi must be positive")
    if len(levels) < 2 or sorted(levels) != list(levels):
        raise DomainError("levels must be increasing")
    rng = rng if rng is not None else make_stream(_DEFAULT_SEED, ("sre-diag", spec.label))
    c_draws, _ = spec.pair_sampler(rng, n_mc)
    powers = c_draws**xi
    rho_hat = float(np.mean(powers))
    rho_se = float(np.std(powers) / np.sqrt(n_mc))
    if rho_hat >= 1.0:
        return ConditionReport(
            quantity="sre_conditions",
            grid={"level": tuple(levels)},
            values={"rho": (rho_hat,), "rho_se": (rho_se,)},
            verdict="violated",
            growth_exponent=None,
            rule="rho = E[C^xi] must be < 1",
        )

    if alpha is None:
        alpha = sre_tail_index(spec, n_mc=min(n_mc, 10**6), rng=rng).alpha
    if not xi < alpha:
        raise DomainError(f"xi={xi} must lie in (0, alpha={alpha:.3f})")
    p_lo = alpha * (1.0 + delta) / (1.0 + 2.0 * delta)
    p_exp = 0.5 * (p_lo + alpha)
    p_tilde = min(0.1 * alpha, 0.5 * (alpha - p_exp))

    req = SeriesRequest(n=n_mc, max_lag=1, burn_in=recommended_burn_in(spec))
    path = generate(spec, req, rng).core()
    lags = np.arange(1, r + 1)
    joint_by_level: dict[float, tuple] = {}
    power_sums = []
    vs = []
    for beta in levels:
        u = float(np.quantile(path, beta))
        u_eps = (1.0 - epsilon) * u
        exceed = path > u_eps
        vs.append(float(np.mean(path > u)))
        base_idx = np.flatnonzero(exceed[: len(path) - r])
        if len(base_idx) == 0:
            raise NoExceedancesError(f"no exceedances at level {beta}")
        joint = []
        for k in lags:
            later = exceed[base_idx + k]
            first = exceed[base_idx + 1] if k > 1 else later
            joint.append(float(np.mean(first & later)))
        joint_by_level[beta] = tuple(joint)
        scaled = path / u
        terms = []
        for k in lags:
            xk = scaled[base_idx + k]
            x0 = scaled[base_idx]
            vals = (xk**p_exp) * (x0**p_tilde) * (xk > 1.0)
            terms.append(float(np.mean(vals)) ** (1.0 / (1.0 + delta)))
        power_sums.append(float(np.sum(terms)))

    deepest = np.asarray(joint_by_level[levels[-1]])
    fit_mask = deepest > 0
    if np.count_nonzero(fit_mask) >= 3:
        decay = float(np.exp(np.polyfit(lags[fit_mask], np.log(deepest[fit_mask]), 1)[0]))
    else:
        decay = float("nan")
    slope = _loglog_slope(np.asarray(vs), np.asarray(power_sums))
    if np.isnan(decay):
        verdict = "inconclusive"
    elif slope >= -0.1:
        verdict = "bounded"
    else:
        verdict = "growing"
    return ConditionReport(
        quantity="sre_conditions",
        grid={"level": tuple(levels), "v": tuple(vs), "lag": tuple(int(k) for k in lags)},
        values={
            "rho": (rho_hat,),
            "rho_se": (rho_se,),
            "alpha": (alpha,),
            "p": (p_exp,),
            "p_tilde": (p_tilde,),
            "delta": (delta,),
            "joint_exceedance_deepest": joint_by_level[levels[-1]],
            "fitted_decay": (decay,),
            "power_sum": tuple(power_sums),
        },
        verdict=verdict,
        growth_exponent=None if np.isnan(slope) else slope,
        rule="bounded iff rho < 1 and the log-log slope of the power sum against v "
             "is >= -0.1; the fitted decay rate of joint exceedances accompanies rho",
    )


# ---------------------------------------------------------------------------
# Order-statistic consistency
# ---------------------------------------------------------------------------

def os_consistency_check(
    model: ModelSpec,
    n_grid: tuple[int, ...],
    k_rule: Callable[[int], int],
    reps: int = 50,
    rng: np.random.Generator | None = None,
    quantiles: dict[float, float] | None = None,
) -> ConditionReport:
    """Ratio of the k-th upper order statistic to the matching quantile.

    For each ``n`` on the grid the ratio ``X_{n-k:n} / F^{-1}(1 - k/n)`` is
    simulated; the sequence is consistent when the spread shrinks along the
    grid and the mean approaches 1.
    """
    if len(n_grid) < 1 or sorted(n_grid) != list(n_grid):
        raise DomainError("n grid must be increasing")
    ks = []
    for n in n_grid:
        k = int(k_rule(n))
        if k < 1 or k >= n or k / n > 0.5:
            raise DomainError(f"k={k} at n={n} is not an intermediate sequence")
        ks.append(k)
    fractions = [k / n for k, n in zip(ks, n_grid)]
    if any(f2 > f1 for f1, f2 in zip(fractions, fractions[1:])):
        raise DomainError("k(n)/n must be nonincreasing along the grid")
    rng = rng if rng is not None else make_stream(_DEFAULT_SEED, ("os-check", model.label))
    means, sds = [], []
    for n, k in zip(n_grid, ks):
        beta = 1.0 - k / n
        if quantiles is not None and beta in quantiles:
            q = quantiles[beta]
        else:
            q = marginal_quantile(model, beta).value
        req = SeriesRequest(n=n, max_lag=1, burn_in=recommended_burn_in(model))
        ratios = np.empty(reps)
        for i in range(reps):
            absx = generate(model, req, rng).abs_core()
            ratios[i] = np.partition(absx, n - k - 1)[n - k - 1] / q
        means.append(float(np.mean(ratios)))
        sds.append(float(np.std(ratios, ddof=1)))
    decreasing = all(s2 < s1 for s1, s2 in zip(sds, sds[1:]))
    near_one = abs(means[-1] - 1.0) <= max(0.05, 3.0 * sds[-1] / np.sqrt(reps))
    verdict = "bounded" if (decreasing or len(n_grid) == 1) and near_one else "inconclusive"
    return ConditionReport(
        quantity="order_statistic_consistency",
        grid={"n": tuple(n_grid), "k": tuple(ks)},
        values={"mean_ratio": tuple(means), "sd_ratio": tuple(sds)},
        verdict=verdict,
        growth_exponent=None,
        rule="bounded iff sd of the ratio decreases along the grid and the final "
             "mean is within max(0.05, 3 se) of 1",
    )


# ---------------------------------------------------------------------------
# CLT normality check
# ---------------------------------------------------------------------------

def clt_normality_check(
    model: ModelSpec,
    n: int,
    threshold: OrderStatistic | QuantileLevel,
    reps: int,
    target: float,
    kind: str = "forward",
    t: int = 1,
    x: float = 1.0,
    survival: bool = True,
    ks_threshold: float = 0.08,
    rng: np.random.Generator | None = None,
) -> ConditionReport:
    """Shape of the standardized estimation errors around a pre-asymptotic center.

    Collects ``sqrt(k) * (estimate - target)`` over independent series and
    reports skewness, excess kurtosis and the KS distance to the best-fitting
    normal.  ``survival=True`` evaluates the estimators in survival form
    (``1 - cdf``), matching how targets are tabulated.
    """
    if kind not in ("forward", "backward", "hill"):
        raise DomainError(f"unknown estimator kind {kind!r}")
    rng = rng if rng is not None else make_stream(_DEFAULT_SEED, ("clt", model.label, kind))
    if isinstance(threshold, OrderStatistic):
        nominal_k = threshold.k
    else:
        nominal_k = n * (1.0 - threshold.beta)
    scale = float(np.sqrt(nominal_k))
    req = SeriesRequest(n=n, max_lag=max(abs(t), 1), burn_in=recommended_burn_in(model))
    sample = np.empty(reps)
    for i in range(reps):
        series = generate(model, req, rng)
        exc = resolve_threshold(series, threshold)
        if kind == "hill":
            est = hill_alpha(series, exc)
        elif kind == "forward":
            est = forward_cdf(series, t, x, exc).estimate
            if survival:
                est = 1.0 - est
        else:
            est = backward_cdf(series, t, x, exc, hill_alpha(series, exc)).estimate
            if survival:
                est = 1.0 - est
        sample[i] = scale * (est - target)
    mu = float(np.mean(sample))
    sd = float(np.std(sample, ddof=1))
    ks = float(_scipy_stats.kstest(sample, lambda z: _scipy_stats.norm.cdf(z, mu, sd)).statistic)
    skew = float(_scipy_stats.skew(sample))
    exkurt = float(_scipy_stats.kurtosis(sample))
    verdict = "bounded" if ks <= ks_threshold else "inconclusive"
    return ConditionReport(
        quantity="clt_normality",
        grid={"n": (n,), "nominal_k": (float(nominal_k),)},
        values={
            "mean": (mu,),
            "sd": (sd,),
            "variance": (sd * sd,),
            "skewness": (skew,),
            "excess_kurtosis": (exkurt,),
            "ks_to_fitted_normal": (ks,),
            "sample": tuple(float(v) for v in sample),
        },
        verdict=verdict,
        growth_exponent=None,
        rule=f"bounded iff the KS distance to the fitted normal is <= {ks_threshold}",
    )
