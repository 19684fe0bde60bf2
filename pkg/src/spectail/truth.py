"""Ground-truth and pre-asymptotic quantities for the built-in models.

Tail indices come from moment equations solved on common random draws, so the
root-finding sees a smooth deterministic function.  Spectral-marginal survival
probabilities ``P{Theta_t > x}`` are available three ways:

* GARCH: Monte Carlo over the power-tilted innovation representation,
* t-copula chains: closed form at lag 1, multiplicative forward chain beyond,
* any copula chain: direct simulation of the defining conditional limit at a
  ladder of extreme thresholds, with the cross-level spread reported as a bias
  indicator.

Pre-asymptotic analogues (exceedance-conditional probabilities, weighted
back-ratio means, mean log-excess) are estimated on long stationary paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .distributions import (
    TiltedInnovationSpec,
    sample_innovation,
    sample_tilted_innovation,
    student_t_cdf,
    student_t_quantile,
)
from .errors import DomainError, NoExceedancesError, NoRootError, UnsupportedLagError
from .models import (
    GarchSpec,
    GumbelHougaard,
    MarkovCopulaSpec,
    ModelSpec,
    SeriesRequest,
    SreSpec,
    TCopula,
    generate,
    recommended_burn_in,
)
from . import _kernels
from .streams import make_stream

__all__ = [
    "TailIndexResult",
    "SpectralQuery",
    "MonteCarloValue",
    "QuantileEstimate",
    "ExtrapolatedValue",
    "PreasymptoticResult",
    "garch_tail_index",
    "garch_tail_index_quadrature",
    "sre_tail_index",
    "marginal_quantile",
    "spectral_survival_garch",
    "spectral_survival_tcopula",
    "spectral_survival_extrapolated",
    "preasymptotic",
    "preasymptotic_table",
]

_DEFAULT_SEED = 0x7A11


@dataclass(frozen=True)
class TailIndexResult:
    alpha: float
    method: str  # "root_find" | "analytic"
    mc_std_error: float


@dataclass(frozen=True)
class SpectralQuery:
    """Survival-function query ``P{Theta_t > x}`` at a nonzero lag."""

    t: int
    x: float

    def __post_init__(self):
        if self.t == 0:
            raise DomainError("spectral lag must be nonzero")


@dataclass(frozen=True)
class MonteCarloValue:
    value: float
    std_error: float


@dataclass(frozen=True)
class QuantileEstimate:
    value: float
    std_error: float
    m: int
    repetitions: int
    method: str  # "analytic" | "order_statistic"


@dataclass(frozen=True)
class ExtrapolatedValue:
    value: float
    std_error: float
    levels: tuple[float, ...]
    level_values: tuple[float, ...]
    spread: float
    converged: bool


@dataclass(frozen=True)
class PreasymptoticResult:
    """Exceedance-conditional analogues the estimators concentrate around."""

    p: float
    p_se: float
    e: float
    e_se: float
    a: float
    a_se: float
    threshold: float
    mean_events: float


# ---------------------------------------------------------------------------
# Tail indices
# ---------------------------------------------------------------------------

def _moment_root(values: np.ndarray, power_of: str, tol: float) -> tuple[float, float]:
    """Root of mean(values^(a/2 or a)) = 1 on common draws, with a delta-method SE."""
    half = power_of == "half"

    def s(a: float) -> float:
        powers = values ** (a / 2.0 if half else a)
        return float(np.mean(powers) - 1.0)

    hi = 1.0
    while s(hi) <= 0.0:
        hi *= 2.0
        if hi > 100.0:
            raise NoRootError("moment equation has no root in (0, 100]")
    lo = min(1e-6, hi / 2.0)
    while s(lo) >= 0.0:
        lo /= 4.0
        if lo < 1e-30:
            raise NoRootError("moment equation has no sign change near 0")
    root = float(brentq(s, lo, hi, xtol=tol))

    exponent = root / 2.0 if half else root
    powers = values**exponent
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(values > 0.0, np.log(values), 0.0)
    deriv = float(np.mean(powers * logs) * (0.5 if half else 1.0))
    se_mean = float(np.std(powers) / np.sqrt(len(powers)))
    return root, se_mean / abs(deriv) if deriv != 0.0 else float("inf")


def garch_tail_index(
    spec: GarchSpec,
    n_mc: int = 10**7,
    tol: float = 1e-10,
    rng: np.random.Generator | None = None,
) -> TailIndexResult:
    """Index of regular variation: the root of ``E[(a1 eps^2 + b1)^(a/2)] = 1``."""
    if spec.alpha1 <= 0:
        raise NoRootError("alpha1 = 0: the squared recursion has no moment-equation root")
    rng = rng if rng is not None else make_stream(_DEFAULT_SEED, ("garch-index",))
    eps = sample_innovation(spec.innovation, n_mc, rng)
    base = spec.alpha1 * eps * eps + spec.beta1
    root, se = _moment_root(base, "half", tol)
    return TailIndexResult(alpha=root, method="root_find", mc_std_error=se)


def garch_tail_index_quadrature(spec: GarchSpec, tol: float = 1e-12) -> TailIndexResult:
    """Same moment equation solved by numeric integration of the innovation law.

    Noise-free alternative to the Monte Carlo root; preferred wherever the
    index feeds another computation (e.g. the tilt exponent of the spectral
    marginal), and the natural cross-check for :func:`garch_tail_index`.
    """
    if spec.alpha1 <= 0:
        raise NoRootError("alpha1 = 0: the squared recursion has no moment-equation root")
    from scipy import integrate
    from scipy.special import gammaln

    from .distributions import StandardizedT, student_t_pdf

    innov = spec.innovation
    is_t = isinstance(innov, StandardizedT)
    log_a1 = np.log(spec.alpha1)
    log_b1 = np.log(spec.beta1) if spec.beta1 > 0 else -np.inf

    def density(x):
        if is_t:
            c = innov.scale
            return student_t_pdf(innov.nu, x / c) / c
        return np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)

    if is_t:
        nu = innov.nu
        c2nu = innov.scale**2 * nu  # = nu - 2
        log_t_norm = (
            gammaln((nu + 1.0) / 2.0) - gammaln(nu / 2.0)
            - 0.5 * np.log(nu * np.pi) - np.log(innov.scale)
        )

        def log_tail_integrand(w: float, a: float) -> float:
            # log of (a1 x^2 + b1)^(a/2) * density(x) * x at x = exp(w)
            log_base = np.logaddexp(2.0 * w + log_a1, log_b1)
            log_f = log_t_norm - 0.5 * (nu + 1.0) * np.logaddexp(0.0, 2.0 * w - np.log(c2nu))
            return 0.5 * a * log_base + log_f + w

    def s(a: float) -> float:
        g = lambda x: (spec.alpha1 * x * x + spec.beta1) ** (a / 2.0) * density(x)
        val = integrate.quad(g, 0.0, 20.0, limit=200)[0]
        if is_t:
            # power tail: integrate in log space so a near nu stays finite
            val += integrate.quad(lambda w: np.exp(log_tail_integrand(w, a)),
                                  np.log(20.0), np.inf, limit=400)[0]
        else:
            val += integrate.quad(g, 20.0, 50.0, limit=200)[0]  # density underflows by 50
        return 2.0 * val - 1.0

    if is_t:
        # E[(a1 eps^2 + b1)^(a/2)] diverges at a = nu, so the root sits below
        hi = innov.nu - 1e-3
        if s(hi) <= 0.0:
            raise NoRootError(f"moment equation has no root in (0, {hi:g})")
    else:
        hi = 1.0
        while s(hi) <= 0.0:
            hi *= 2.0
            if hi > 100.0:
                raise NoRootError("moment equation has no root in (0, 100]")
    root = float(brentq(s, 1e-6, hi, xtol=tol))
    return TailIndexResult(alpha=root, method="quadrature", mc_std_error=0.0)


def sre_tail_index(
    spec: SreSpec,
    n_mc: int = 10**6,
    tol: float = 1e-10,
    rng: np.random.Generator | None = None,
) -> TailIndexResult:
    """Index solving ``E[C^a] = 1`` for the affine recursion."""
    rng = rng if rng is not None else make_stream(_DEFAULT_SEED, ("sre-index",))
    c, _ = spec.pair_sampler(rng, n_mc)
    root, se = _moment_root(c, "full", tol)
    return TailIndexResult(alpha=root, method="root_find", mc_std_error=se)


# ---------------------------------------------------------------------------
# Marginal quantiles of |X_0|
# ---------------------------------------------------------------------------

def marginal_quantile(
    model: ModelSpec,
    beta: float,
    m: int = 10**6,
    repetitions: int = 20,
    rng: np.random.Generator | None = None,
) -> QuantileEstimate:
    """Quantile of ``|X_0|`` at level ``beta``.

    Copula models (and recursions with a known closed form) are analytic; the
    rest average the ``floor(m*beta)``-th ascending order statistic of
    ``|X_1..X_m|`` over independent repetitions.
    """
    if not 0.0 < beta < 1.0:
        raise DomainError(f"level must lie in (0,1), got {beta}")
    if isinstance(model, MarkovCopulaSpec):
        value = student_t_quantile(model.marginal_nu, (1.0 + beta) / 2.0)
        return QuantileEstimate(value, 0.0, 0, 0, "analytic")
    if isinstance(model, SreSpec) and model.quantile_fn is not None:
        return QuantileEstimate(float(model.quantile_fn(beta)), 0.0, 0, 0, "analytic")

    rank = int(np.floor(m * beta))
    if rank >= m or rank < 1:
        raise DomainError(f"m={m} cannot resolve level beta={beta}")
    rng = rng if rng is not None else make_stream(_DEFAULT_SEED, ("quantile", model.label))
    req = SeriesRequest(n=m, max_lag=1, burn_in=recommended_burn_in(model))
    stats = np.empty(repetitions)
    for r in range(repetitions):
        path = generate(model, req, rng).abs_core()
        stats[r] = np.partition(path, rank - 1)[rank - 1]
    se = float(np.std(stats, ddof=1) / np.sqrt(repetitions)) if repetitions > 1 else 0.0
    return QuantileEstimate(float(np.mean(stats)), se, m, repetitions, "order_statistic")


# ---------------------------------------------------------------------------
# Spectral-marginal survival functions
# ---------------------------------------------------------------------------

def spectral_survival_garch(
    spec: GarchSpec,
    query: SpectralQuery,
    alpha: float,
    n_mc: int = 10**7,
    rng: np.random.Generator | None = None,
) -> MonteCarloValue:
    """``P{Theta_t > x}`` for GARCH via the tilted-innovation representation.

    ``Theta_t = (e_t / |e_0|) * prod_{j<t} (a1 e_j^2 + b1)^(1/2)`` with ``e_0``
    drawn from the ``|x|^alpha``-tilted innovation law and the rest iid.
    """
    if query.t < 1:
        raise UnsupportedLagError("the representation covers forward lags t >= 1 only")
    rng = rng if rng is not None else make_stream(_DEFAULT_SEED, ("spectral-garch",))
    t = query.t
    tilted = TiltedInnovationSpec(spec.innovation, alpha)
    e0 = sample_tilted_innovation(tilted, n_mc, rng)
    growth = spec.alpha1 * e0 * e0 + spec.beta1
    for _ in range(1, t):
        ej = sample_innovation(spec.innovation, n_mc, rng)
        growth *= spec.alpha1 * ej * ej + spec.beta1
    et = sample_innovation(spec.innovation, n_mc, rng)
    theta = (et / np.abs(e0)) * np.sqrt(growth)
    p = float(np.mean(theta > query.x))
    return MonteCarloValue(p, float(np.sqrt(p * (1.0 - p) / n_mc)))


def _t_survival(nu: float, z: float) -> float:
    return float(student_t_cdf(nu, -z))


def spectral_survival_tcopula(
    nu: float,
    rho: float,
    query: SpectralQuery,
    n_mc: int = 10**6,
    rng: np.random.Generator | None = None,
) -> MonteCarloValue:
    """``P{Theta_t > x}`` for the t-copula chain.

    Lag 1 is closed form: the tail limit of the bivariate-t conditional from
    either marginal tail, ``(sf((x-rho)/c) + sf((x+rho)/c)) / 2`` under
    t(nu+1), with ``c = sqrt((1-rho^2)/(nu+1))``.  Larger lags iterate the
    multiplicative forward chain ``Theta_k = Theta_{k-1} (rho + c T_k)``.
    """
    if not -1.0 < rho < 1.0:
        raise DomainError(f"correlation must lie in (-1,1), got {rho}")
    if query.t < 1:
        raise UnsupportedLagError("forward chain covers lags t >= 1 only")
    c = float(np.sqrt((1.0 - rho * rho) / (nu + 1.0)))
    if query.t == 1:
        p = 0.5 * (_t_survival(nu + 1.0, (query.x - rho) / c)
                   + _t_survival(nu + 1.0, (query.x + rho) / c))
        return MonteCarloValue(p, 0.0)
    rng = rng if rng is not None else make_stream(_DEFAULT_SEED, ("spectral-tcop",))
    theta = rng.integers(0, 2, n_mc) * 2.0 - 1.0
    for _ in range(query.t):
        theta = theta * (rho + c * rng.standard_t(nu + 1.0, n_mc))
    p = float(np.mean(theta > query.x))
    return MonteCarloValue(p, float(np.sqrt(p * (1.0 - p) / n_mc)))


def _tail_conditioned_rollout(
    model: MarkovCopulaSpec,
    level: float,
    t: int,
    n_mc: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draws of ``X_t / |X_0|`` given ``|X_0|`` above the marginal level-quantile."""
    nu = model.marginal_nu
    b = level + (1.0 - level) * rng.random(n_mc)
    sign = rng.integers(0, 2, n_mc) * 2.0 - 1.0
    mag = student_t_quantile(nu, (1.0 + b) / 2.0)
    if isinstance(model.copula, TCopula):
        rho = model.copula.rho
        f = (1.0 - rho * rho) / (nu + 1.0)
        x = sign * mag
        for _ in range(t):
            x = rho * x + np.sqrt((nu + x * x) * f) * rng.standard_t(nu + 1.0, n_mc)
        return x / mag
    theta = model.copula.theta
    u = np.where(sign > 0, (1.0 + b) / 2.0, (1.0 - b) / 2.0)
    for _ in range(t):
        u = _kernels.gumbel_cond_inverse_array(u, rng.random(n_mc), theta)
    return student_t_quantile(nu, u) / mag


def spectral_survival_extrapolated(
    model: MarkovCopulaSpec,
    query: SpectralQuery,
    levels: tuple[float, ...] = (1.0 - 1e-4, 1.0 - 1e-5, 1.0 - 1e-6),
    n_mc: int = 10**6,
    rng: np.random.Generator | None = None,
) -> ExtrapolatedValue:
    """``P{Theta_t > x}`` by simulating the defining conditional limit.

    ``|X_0|`` is drawn from the marginal tail above each level by inverse cdf
    (entering from the + or - side with probability 1/2), the chain is rolled
    forward with the exact conditional transition, and the deepest-level
    estimate is returned with the cross-level spread as a bias indicator.
    """
    if query.t < 1:
        raise UnsupportedLagError("tail-conditioned rollout covers lags t >= 1 only")
    if len(levels) < 1 or any(not 0.0 < lv < 1.0 for lv in levels):
        raise DomainError("levels must lie in (0,1)")
    rng = rng if rng is not None else make_stream(_DEFAULT_SEED, ("spectral-extrap",))
    ordered = sorted(levels)
    vals = []
    se = 0.0
    for lv in ordered:
        ratios = _tail_conditioned_rollout(model, lv, query.t, n_mc, rng)
        p = float(np.mean(ratios > query.x))
        vals.append(p)
        se = float(np.sqrt(p * (1.0 - p) / n_mc))
    spread = float(max(vals) - min(vals))
    return ExtrapolatedValue(
        value=vals[-1],
        std_error=se,
        levels=tuple(ordered),
        level_values=tuple(vals),
        spread=spread,
        converged=bool(spread <= 5.0 * max(se, 1e-12)),
    )


# ---------------------------------------------------------------------------
# Pre-asymptotic quantities
# ---------------------------------------------------------------------------

def preasymptotic_table(
    model: ModelSpec,
    betas: tuple[float, ...],
    xs: tuple[float, ...],
    t: int = 1,
    path_length: int = 10**6,
    repetitions: int = 10,
    thresholds: dict[float, float] | None = None,
    rng: np.random.Generator | None = None,
) -> dict[tuple[float, float], PreasymptoticResult]:
    """Exceedance-conditional quantities on long stationary paths.

    For each level ``beta`` (threshold ``q``) and argument ``x``:

    * ``p`` - conditional probability of ``X_{i+t}/|X_i| > x``,
    * ``a`` - conditional mean of ``log(|X_i|/q)``,
    * ``e`` - conditional mean of ``|X_{i-t}/X_i|^(1/a)`` gated by
      ``X_i/|X_{i-t}| > x``,

    conditioning on ``|X_i| > q``.  Standard errors are across repetitions.
    """
    if t < 1:
        raise UnsupportedLagError("pre-asymptotic quantities are defined for lags t >= 1")
    if repetitions < 2:
        raise DomainError("need at least 2 repetitions for a standard error")
    rng = rng if rng is not None else make_stream(_DEFAULT_SEED, ("preasym", model.label))
    if thresholds is None:
        thresholds = {
            b: marginal_quantile(model, b, rng=make_stream(_DEFAULT_SEED, ("preasym-q", model.label, str(b)))).value
            for b in betas
        }
    req = SeriesRequest(n=path_length, max_lag=t, burn_in=recommended_burn_in(model))
    acc: dict[tuple[float, float], list[tuple[float, float, float]]] = {
        (b, x): [] for b in betas for x in xs
    }
    events: dict[float, list[int]] = {b: [] for b in betas}
    for _ in range(repetitions):
        series = generate(model, req, rng)
        vals = series.values
        core = series.core()
        absc = np.abs(core)
        for b in betas:
            q = thresholds[b]
            idx = np.flatnonzero(absc > q)
            if len(idx) == 0:
                raise NoExceedancesError(f"no exceedances of level {b} on the path")
            events[b].append(len(idx))
            pos = idx + series.max_lag
            cur = vals[pos]
            abscur = np.abs(cur)
            fwd = vals[pos + t] / abscur
            prev = vals[pos - t]
            nz = prev != 0.0
            a_rep = float(np.mean(np.log(abscur / q)))
            back_w = np.abs(prev[nz] / cur[nz]) ** (1.0 / a_rep)
            back_ratio = cur[nz] / np.abs(prev[nz])
            for x in xs:
                p_rep = float(np.mean(fwd > x))
                e_rep = float(np.sum(back_w * (back_ratio > x)) / len(idx))
                acc[(b, x)].append((p_rep, e_rep, a_rep))
    out: dict[tuple[float, float], PreasymptoticResult] = {}
    for (b, x), rows in acc.items():
        arr = np.asarray(rows)
        means = arr.mean(axis=0)
        ses = arr.std(axis=0, ddof=1) / np.sqrt(repetitions)
        out[(b, x)] = PreasymptoticResult(
            p=float(means[0]), p_se=float(ses[0]),
            e=float(means[1]), e_se=float(ses[1]),
            a=float(means[2]), a_se=float(ses[2]),
            threshold=float(thresholds[b]),
            mean_events=float(np.mean(events[b])),
        )
    return out


def preasymptotic(
    model: ModelSpec,
    beta: float,
    t: int = 1,
    x: float = 1.0,
    path_length: int = 10**6,
    repetitions: int = 10,
    threshold: float | None = None,
    rng: np.random.Generator | None = None,
) -> PreasymptoticResult:
    """Single-cell convenience wrapper around :func:`preasymptotic_table`."""
    thresholds = None if threshold is None else {beta: threshold}
    table = preasymptotic_table(
        model, (beta,), (x,), t=t, path_length=path_length,
        repetitions=repetitions, thresholds=thresholds, rng=rng,
    )
    return table[(beta, x)]
