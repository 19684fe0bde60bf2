"""Exceedance-based estimators of the spectral tail process marginals.

Thresholds may be deterministic levels, intermediate order statistics, or
quantile levels resolved through a caller-supplied function.  Exceedances are
always strict (``|X_i| > u``), matching every indicator in the estimator
definitions; a point equal to the threshold never counts.

The forward estimator is the empirical conditional cdf of ``X_{i+t}/|X_i|``
over exceedances; the backward estimator reweights back-ratios
``|X_{i-t}/X_i|^alpha`` through the time-change identity; the Hill-type
estimator is the reciprocal mean log-excess.  All three are also expressible
as ratios of generalized tail array sums, and :func:`tail_array_sum` computes
those sums in the same floating-point form so the identities hold bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NoExceedancesError, UnsupportedLagError
from .models import TimeSeries

__all__ = [
    "Deterministic",
    "OrderStatistic",
    "QuantileLevel",
    "ThresholdSpec",
    "ExceedanceSet",
    "EstimateRecord",
    "resolve_threshold",
    "hill_alpha",
    "hill_record",
    "forward_cdf",
    "backward_cdf",
    "LogExcess",
    "ExceedanceIndicator",
    "ForwardRatioIndicator",
    "BackwardRatioPower",
    "TailFunctional",
    "tail_array_sum",
]


# ---------------------------------------------------------------------------
# Thresholds and exceedances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Deterministic:
    """Fixed threshold level ``u > 0``."""

    u: float

    def __post_init__(self):
        if not self.u > 0:
            raise DomainError(f"threshold must be positive, got {self.u}")


@dataclass(frozen=True)
class OrderStatistic:
    """Threshold at the (n-k)-th ascending order statistic of ``|X_1..X_n|``."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"order-statistic index must be >= 1, got {self.k}")


@dataclass(frozen=True)
class QuantileLevel:
    """Threshold at the marginal ``beta``-quantile of ``|X_0|``.

    ``resolver`` maps the level to a numeric threshold (analytic quantile or a
    cached Monte Carlo table); it must be supplied before resolution.
    """

    beta: float
    resolver: Callable[[float], float] | None = None

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise DomainError(f"quantile level must lie in (0,1), got {self.beta}")


ThresholdSpec = Deterministic | OrderStatistic | QuantileLevel


@dataclass(frozen=True)
class ExceedanceSet:
    """Strict exceedances of ``|X_i|`` over a resolved threshold, ``i`` in 1..n."""

    threshold_value: float
    indices: np.ndarray  # sorted 1-based core positions

    @property
    def count(self) -> int:
        return int(len(self.indices))


def resolve_threshold(series: TimeSeries, spec: ThresholdSpec) -> ExceedanceSet:
    """Resolve a threshold spec on a series and collect its exceedance set.

    With ``OrderStatistic(k)`` exactly ``k`` points exceed whenever the top
    ``k+1`` absolute values are distinct; ties at the threshold are excluded.
    """
    absx = series.abs_core()
    n = series.n
    if isinstance(spec, OrderStatistic):
        if spec.k >= n:
            raise DomainError(f"order-statistic index k={spec.k} must be < n={n}")
        u = float(np.partition(absx, n - spec.k - 1)[n - spec.k - 1])
    elif isinstance(spec, QuantileLevel):
        if spec.resolver is None:
            raise DomainError("quantile-level threshold has no resolver attached")
        u = float(spec.resolver(spec.beta))
        if not u > 0:
            raise DomainError(f"resolved threshold must be positive, got {u}")
    else:
        u = spec.u
    indices = np.flatnonzero(absx > u).astype(np.int64) + 1
    return ExceedanceSet(threshold_value=u, indices=indices)


# ---------------------------------------------------------------------------
# Point estimators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EstimateRecord:
    """One evaluated estimate together with how it was obtained."""

    kind: str  # "forward" | "backward" | "hill"
    lag: int
    x: float | None
    threshold: ThresholdSpec
    threshold_value: float
    estimate: float
    exceedance_count: int
    alpha_hat_used: float | None = None


def _positions(series: TimeSeries, exc: ExceedanceSet, lag: int) -> np.ndarray:
    if lag == 0:
        raise UnsupportedLagError("lag must be nonzero")
    if abs(lag) > series.max_lag:
        raise UnsupportedLagError(
            f"lag {lag} exceeds series padding max_lag={series.max_lag}"
        )
    if exc.count == 0:
        raise NoExceedancesError(
            f"no exceedances over threshold {exc.threshold_value}"
        )
    return exc.indices + series.max_lag - 1


def hill_alpha(series: TimeSeries, exc: ExceedanceSet) -> float:
    """Reciprocal mean log-excess of ``|X_i|`` over the threshold."""
    if exc.count == 0:
        raise NoExceedancesError(
            f"no exceedances over threshold {exc.threshold_value}"
        )
    pos = exc.indices + series.max_lag - 1
    logs = np.log(np.abs(series.values[pos]) / exc.threshold_value)
    return float(exc.count / np.sum(logs))


def hill_record(
    series: TimeSeries, exc: ExceedanceSet, spec: ThresholdSpec
) -> EstimateRecord:
    alpha = hill_alpha(series, exc)
    return EstimateRecord(
        kind="hill",
        lag=0,
        x=None,
        threshold=spec,
        threshold_value=exc.threshold_value,
        estimate=alpha,
        exceedance_count=exc.count,
        alpha_hat_used=alpha,
    )


def forward_cdf(
    series: TimeSeries,
    t: int,
    x: float,
    exc: ExceedanceSet,
    spec: ThresholdSpec | None = None,
) -> EstimateRecord:
    """Empirical cdf of ``X_{i+t}/|X_i|`` at ``x`` over the exceedance set.

    The value is a multiple of ``1/count`` and is nondecreasing and
    right-continuous in ``x``.
    """
    pos = _positions(series, exc, t)
    vals = series.values
    ratios = vals[pos + t] / np.abs(vals[pos])
    est = float(np.count_nonzero(ratios <= x) / exc.count)
    return EstimateRecord(
        kind="forward",
        lag=t,
        x=x,
        threshold=spec if spec is not None else Deterministic(exc.threshold_value),
        threshold_value=exc.threshold_value,
        estimate=est,
        exceedance_count=exc.count,
    )


def backward_cdf(
    series: TimeSeries,
    t: int,
    x: float,
    exc: ExceedanceSet,
    alpha_hat: float,
    spec: ThresholdSpec | None = None,
) -> EstimateRecord:
    """Time-change-based estimator of the cdf of the lag-``t`` spectral value.

    Exceedance ``i`` contributes ``|X_{i-t}/X_i|^alpha_hat`` gated by the sign
    of ``x``; terms with ``X_{i-t} = 0`` contribute nothing.  The value is not
    clipped to [0, 1]: excursions outside are reported as-is.
    """
    if not alpha_hat > 0:
        raise DomainError(f"alpha_hat must be positive, got {alpha_hat}")
    pos = _positions(series, exc, t)
    vals = series.values
    prev = vals[pos - t]
    cur = vals[pos]
    nz = prev != 0.0
    # near-subnormal predecessors can overflow the signed ratio to inf, which
    # compares correctly against any finite x
    with np.errstate(over="ignore"):
        weights = np.abs(prev[nz] / cur[nz]) ** alpha_hat
        signed_ratio = cur[nz] / np.abs(prev[nz])
    if x >= 0:
        est = 1.0 - float(np.sum(weights * (signed_ratio > x)) / exc.count)
    else:
        est = float(np.sum(weights * (signed_ratio <= x)) / exc.count)
    return EstimateRecord(
        kind="backward",
        lag=t,
        x=x,
        threshold=spec if spec is not None else Deterministic(exc.threshold_value),
        threshold_value=exc.threshold_value,
        estimate=est,
        exceedance_count=exc.count,
        alpha_hat_used=alpha_hat,
    )


# ---------------------------------------------------------------------------
# Generalized tail array sums
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogExcess:
    """log(z_0 / s) over points with z_0 > s; denominator of the Hill ratio."""

    s: float = 1.0


@dataclass(frozen=True)
class ExceedanceIndicator:
    """1{z_0 > s}; sums to the exceedance count."""

    s: float = 1.0


@dataclass(frozen=True)
class ForwardRatioIndicator:
    """1{z_t/z_0 > x, z_0 > s}; complements the forward estimator numerator."""

    t: int
    x: float
    s: float = 1.0


@dataclass(frozen=True)
class BackwardRatioPower:
    """(z_{-t}/z_0)^alpha 1{z_0/z_{-t} > y, z_{-t} > 0, z_0 > s}."""

    t: int
    y: float
    alpha: float
    s: float = 1.0

    def __post_init__(self):
        if not self.y > 0:
            raise DomainError(f"y must be positive, got {self.y}")
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")


TailFunctional = LogExcess | ExceedanceIndicator | ForwardRatioIndicator | BackwardRatioPower


def tail_array_sum(
    series: TimeSeries,
    phi: TailFunctional,
    u_n: float,
    epsilon: float = 0.1,
) -> float:
    """Sum of a tail functional over the standardized lag windows.

    Windows are ``(X_{i-max_lag}, .., X_{i+max_lag}) / u_n`` gated by
    ``|X_i| > (1-epsilon) u_n``; the comparison ``z_0 > s`` is evaluated as
    ``|X_i| > s * u_n`` so ratios of these sums agree bit-for-bit with the
    direct estimators at threshold ``s * u_n``.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0,1), got {epsilon}")
    if not u_n > 0:
        raise DomainError(f"u_n must be positive, got {u_n}")
    s = phi.s
    if not (1.0 - epsilon) <= s <= (1.0 + epsilon):
        raise DomainError(
            f"s={s} outside the margin [{1 - epsilon}, {1 + epsilon}]"
        )
    tl = series.max_lag
    core = series.core()
    absc = np.abs(core)
    gate = absc > (1.0 - epsilon) * u_n
    su = s * u_n
    sel = gate & (absc > su)  # z_0 > s, within the gate
    if isinstance(phi, ExceedanceIndicator):
        return float(np.count_nonzero(sel))
    if isinstance(phi, LogExcess):
        return float(np.sum(np.log(absc[sel] / su)))

    lag = phi.t
    if lag == 0 or abs(lag) > tl:
        raise UnsupportedLagError(f"functional lag {lag} incompatible with padding {tl}")
    pos = np.flatnonzero(sel) + tl  # positions of selected core points in values
    vals = series.values
    cur = vals[pos]
    if isinstance(phi, ForwardRatioIndicator):
        ratios = vals[pos + lag] / np.abs(cur)
        return float(np.count_nonzero(ratios > phi.x))
    # backward power functional
    prev = vals[pos - lag]
    posk = prev > 0.0
    with np.errstate(over="ignore"):
        w = np.abs(prev[posk] / cur[posk]) ** phi.alpha
        keep = cur[posk] / np.abs(prev[posk]) > phi.y
    return float(np.sum(w * keep))
