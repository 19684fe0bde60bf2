"""Multiplier block bootstrap for the exceedance-based estimators.

The core window is split into ``m = n // r`` contiguous blocks of length
``r`` (the trailing partial block is dropped, and the point estimate inside a
bootstrap context is computed on the same trimmed window so that forcing all
multipliers to zero reproduces it exactly).  Each replicate reweights block
sums by ``1 + xi_j`` with iid bounded multipliers of mean 0 and variance 1;
the backward replicate recomputes its tail-index plug-in from the same
multiplier draw.

A replicate whose weighted denominator vanishes (possible under Rademacher
weights, where ``1 + xi`` can be 0) is flagged as degenerate rather than
fatal; confidence intervals refuse to form if more than 20% of replicates
degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoExceedancesError, UnreliableCIError
from .estimators import (
    EstimateRecord,
    ExceedanceSet,
    ThresholdSpec,
    backward_cdf,
    forward_cdf,
    hill_alpha,
    hill_record,
    resolve_threshold,
)
from .models import TimeSeries

__all__ = ["MultiplierSpec", "BootstrapResult", "multiplier_replicate", "bootstrap_ci"]

_LAWS = ("rademacher", "uniform_symmetric")


@dataclass(frozen=True)
class MultiplierSpec:
    """Multiplier law, replicate count and block length.

    ``block_length=None`` selects ``ceil(k^0.4)`` from the exceedance count
    ``k``, which keeps block growth compatible with the thresholds' rate
    requirements at simulation scale.
    """

    law: str = "rademacher"
    replicates: int = 500
    block_length: int | None = None

    def __post_init__(self):
        if self.law not in _LAWS:
            raise DomainError(f"unknown multiplier law {self.law!r}; use one of {_LAWS}")
        if self.replicates < 1:
            raise DomainError("replicate count must be >= 1")
        if self.block_length is not None and self.block_length < 1:
            raise DomainError("block length must be >= 1")


@dataclass(frozen=True)
class BootstrapResult:
    point: EstimateRecord
    replicates: np.ndarray
    ci: tuple[float, float]
    level: float
    degenerate_count: int
    block_length: int
    n_blocks: int


def _draw_xis(spec: MultiplierSpec, shape, rng: np.random.Generator) -> np.ndarray:
    if spec.law == "rademacher":
        return rng.integers(0, 2, shape) * 2.0 - 1.0
    bound = math.sqrt(3.0)
    return rng.uniform(-bound, bound, shape)


class _BlockData:
    """Block-aggregated sums for fast replicate evaluation."""

    def __init__(self, series: TimeSeries, exc: ExceedanceSet, r: int, t: int | None, x: float | None):
        n = series.n
        self.r = r
        self.m = n // r
        if self.m < 1:
            raise DomainError(f"block length {r} exceeds core length {n}")
        span = self.m * r
        keep = exc.indices <= span
        idx = exc.indices[keep]
        self.trimmed = ExceedanceSet(exc.threshold_value, idx)
        if self.trimmed.count == 0:
            raise NoExceedancesError("no exceedances inside complete blocks")
        blk = (idx - 1) // r
        pos = idx + series.max_lag - 1
        vals = series.values
        absx = np.abs(vals[pos])
        logs = np.log(absx / exc.threshold_value)
        self.den = np.bincount(blk, minlength=self.m).astype(float)
        self.logs = np.bincount(blk, weights=logs, minlength=self.m)
        self.t = t
        self.x = x
        if t is not None:
            fwd_ind = (vals[pos + t] / absx) <= x
            self.fwd = np.bincount(blk, weights=fwd_ind.astype(float), minlength=self.m)
            prev = vals[pos - t]
            nz = prev != 0.0
            self.back_ratio = np.abs(prev[nz] / vals[pos][nz])
            signed = vals[pos][nz] / np.abs(prev[nz])
            self.back_keep = (signed > x) if x >= 0 else (signed <= x)
            self.back_blk = blk[nz]


def _replicate_values(kind: str, data: _BlockData, weights: np.ndarray) -> np.ndarray:
    """Evaluate replicates for a (B, m) weight matrix; degenerate -> NaN."""
    den = weights @ data.den
    out = np.full(weights.shape[0], np.nan)
    if kind == "forward":
        ok = den != 0.0
        out[ok] = (weights @ data.fwd)[ok] / den[ok]
        return out
    logsum = weights @ data.logs
    ok = (logsum != 0.0) & (den != 0.0)
    alpha_star = np.full_like(den, np.nan)
    alpha_star[ok] = den[ok] / logsum[ok]
    if kind == "hill":
        return alpha_star
    if kind != "backward":
        raise DomainError(f"unknown estimator kind {kind!r}")
    ok &= alpha_star > 0
    if np.any(ok):
        ratios = data.back_ratio[data.back_keep]
        blocks = data.back_blk[data.back_keep]
        powered = ratios[None, :] ** alpha_star[ok, None]
        num = np.einsum("bi,bi->b", powered, weights[ok][:, blocks])
        xval = data.x
        if xval >= 0:
            out[ok] = 1.0 - num / den[ok]
        else:
            out[ok] = num / den[ok]
    return out


def multiplier_replicate(
    series: TimeSeries,
    kind: str,
    t: int | None,
    x: float | None,
    exc: ExceedanceSet,
    mult: MultiplierSpec,
    rng: np.random.Generator | None = None,
    xis: np.ndarray | None = None,
) -> float:
    """One bootstrap replicate of the chosen estimator; NaN when degenerate.

    ``xis`` overrides the multiplier draw (test hook for forced weights).
    """
    if exc.count == 0:
        raise NoExceedancesError("empty exceedance set")
    r = mult.block_length if mult.block_length is not None else max(1, math.ceil(exc.count**0.4))
    data = _BlockData(series, exc, r, t if kind != "hill" else (t or 1), x if x is not None else 0.0)
    if xis is None:
        if rng is None:
            raise DomainError("provide either a random stream or explicit multipliers")
        xis = _draw_xis(mult, data.m, rng)
    xis = np.asarray(xis, dtype=float)
    if xis.shape != (data.m,):
        raise DomainError(f"expected {data.m} multipliers, got shape {xis.shape}")
    return float(_replicate_values(kind, data, (1.0 + xis)[None, :])[0])


def _point_on_trimmed(
    series: TimeSeries, kind: str, t: int | None, x: float | None,
    exc: ExceedanceSet, spec: ThresholdSpec,
) -> EstimateRecord:
    if kind == "forward":
        return forward_cdf(series, t, x, exc, spec)
    if kind == "backward":
        return backward_cdf(series, t, x, exc, hill_alpha(series, exc), spec)
    if kind == "hill":
        return hill_record(series, exc, spec)
    raise DomainError(f"unknown estimator kind {kind!r}")


def bootstrap_ci(
    series: TimeSeries,
    kind: str,
    t: int | None,
    x: float | None,
    threshold: ThresholdSpec,
    mult: MultiplierSpec,
    level: float = 0.95,
    rng: np.random.Generator | None = None,
    xis: np.ndarray | None = None,
) -> BootstrapResult:
    """Basic bootstrap interval from the percentiles of replicate-minus-point.

    The threshold is resolved once on the full core (order statistics are
    valid here) and shared by the point estimate and every replicate.
    ``xis`` may supply a (B, m) matrix of multipliers (test hook).
    """
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must lie in (0,1), got {level}")
    exc = resolve_threshold(series, threshold)
    if exc.count == 0:
        raise NoExceedancesError("no exceedances over the resolved threshold")
    r = mult.block_length if mult.block_length is not None else max(1, math.ceil(exc.count**0.4))
    data = _BlockData(series, exc, r, t if kind != "hill" else (t or 1), x if x is not None else 0.0)
    point = _point_on_trimmed(series, kind, t, x, data.trimmed, threshold)
    if xis is None:
        if rng is None:
            raise DomainError("provide either a random stream or explicit multipliers")
        xis = _draw_xis(mult, (mult.replicates, data.m), rng)
    xis = np.asarray(xis, dtype=float)
    if xis.ndim != 2 or xis.shape[1] != data.m:
        raise DomainError(f"expected multipliers of shape (B, {data.m})")
    values = _replicate_values(kind, data, 1.0 + xis)
    good = values[~np.isnan(values)]
    degenerate = int(len(values) - len(good))
    if degenerate > 0.2 * len(values):
        raise UnreliableCIError(
            f"{degenerate}/{len(values)} degenerate replicates; interval unreliable"
        )
    diffs = good - point.estimate
    lo = point.estimate - float(np.quantile(diffs, (1.0 + level) / 2.0))
    hi = point.estimate - float(np.quantile(diffs, (1.0 - level) / 2.0))
    return BootstrapResult(
        point=point,
        replicates=values,
        ci=(lo, hi),
        level=level,
        degenerate_count=degenerate,
        block_length=r,
        n_blocks=data.m,
    )
