"""Stationary heavy-tailed time-series models and their generators.

Three families are provided:

* GARCH(1,1) with normal or standardized-t innovations,
* Markov chains with a Student-t marginal and either a bivariate-t or a
  Gumbel-Hougaard copula between consecutive observations,
* nonnegative solutions of the affine recursion ``X_t = C_t X_{t-1} + D_t``.

Generated paths carry symmetric padding of ``max_lag`` points around a core
window of length ``n`` so that lagged ratios at the window edges are defined.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .distributions import (
    InnovationSpec,
    StandardNormal,
    StandardizedT,
    sample_innovation,
    student_t_quantile,
)
from .errors import DomainError, GenerationError
from .streams import make_stream

__all__ = [
    "GarchSpec",
    "TCopula",
    "GumbelHougaard",
    "MarkovCopulaSpec",
    "SreSpec",
    "SeriesRequest",
    "TimeSeries",
    "ModelSpec",
    "generate_garch",
    "generate_markov_copula",
    "generate_sre",
    "generate",
    "recommended_burn_in",
    "lognormal_sre",
    "constant_factor_sre",
    "iid_pareto_sre",
]

_VALIDATION_SEED = 0x5EED_CAFE
_VALIDATION_DRAWS = 200_000


# ---------------------------------------------------------------------------
# Model specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GarchSpec:
    """GARCH(1,1): ``X_t = sigma_t * eps_t``, ``sigma_t^2 = a0 + a1 X_{t-1}^2 + b1 sigma_{t-1}^2``."""

    alpha0: float
    alpha1: float
    beta1: float
    innovation: InnovationSpec = field(default_factory=StandardNormal)

    def __post_init__(self):
        if not self.alpha0 > 0:
            raise DomainError(f"alpha0 must be positive, got {self.alpha0}")
        if self.alpha1 < 0 or self.beta1 < 0:
            raise DomainError("alpha1 and beta1 must be nonnegative")
        if not self._lyapunov_negative():
            raise DomainError(
                "no stationary solution: E[log(alpha1*eps^2 + beta1)] >= 0 "
                f"for alpha1={self.alpha1}, beta1={self.beta1}"
            )

    def _lyapunov_negative(self) -> bool:
        if self.alpha1 == 0.0:
            return self.beta1 < 1.0
        rng = make_stream(_VALIDATION_SEED, ("garch-lyapunov",))
        eps = sample_innovation(self.innovation, _VALIDATION_DRAWS, rng)
        with np.errstate(divide="ignore"):
            drift = np.mean(np.log(self.alpha1 * eps * eps + self.beta1))
        return bool(drift < 0)

    @property
    def label(self) -> str:
        return f"garch-{self.innovation}"


@dataclass(frozen=True)
class TCopula:
    """Copula of a bivariate t distribution with ``nu`` df and correlation ``rho``."""

    nu: float
    rho: float

    def __post_init__(self):
        if not self.nu > 0:
            raise DomainError(f"copula df must be positive, got {self.nu}")
        if not -1.0 < self.rho < 1.0:
            raise DomainError(f"correlation must lie in (-1, 1), got {self.rho}")


@dataclass(frozen=True)
class GumbelHougaard:
    """Gumbel-Hougaard copula; ``theta = 1`` is independence."""

    theta: float

    def __post_init__(self):
        if not self.theta >= 1.0:
            raise DomainError(f"theta must be >= 1, got {self.theta}")


@dataclass(frozen=True)
class MarkovCopulaSpec:
    """Stationary Markov chain: Student-t marginal + copula of consecutive pairs."""

    marginal_nu: float
    copula: TCopula | GumbelHougaard

    def __post_init__(self):
        if not self.marginal_nu > 0:
            raise DomainError(f"marginal df must be positive, got {self.marginal_nu}")
        if isinstance(self.copula, TCopula) and self.copula.nu != self.marginal_nu:
            # the closed-form conditional used by the generator works on the t
            # scale only when both df agree
            raise DomainError(
                "t-copula df must equal the marginal df "
                f"(got {self.copula.nu} vs {self.marginal_nu})"
            )

    @property
    def label(self) -> str:
        if isinstance(self.copula, TCopula):
            return f"tcop-r{self.copula.rho:g}"
        return f"gumcop-t{self.copula.theta:g}"


PairSampler = Callable[[np.random.Generator, int], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class SreSpec:
    """Affine stochastic recursion driven by iid nonnegative pairs ``(C_t, D_t)``."""

    pair_sampler: PairSampler
    name: str = "sre"
    quantile_fn: Callable[[float], float] | None = None  # analytic marginal quantile, if known

    def __post_init__(self):
        rng = make_stream(_VALIDATION_SEED, ("sre-check", self.name))
        c, d = self.pair_sampler(rng, _VALIDATION_DRAWS)
        if np.any(c < 0) or np.any(d < 0):
            raise DomainError("pair sampler must produce nonnegative factors")
        with np.errstate(divide="ignore"):
            drift = np.mean(np.log(c))
        if not drift < 0:
            raise DomainError(f"E[log C] = {drift:.4g} >= 0: no stationary solution")
        logplus_d = np.mean(np.log(np.maximum(d, 1.0)))
        if not np.isfinite(logplus_d):
            raise DomainError("E[log+ D] must be finite")

    @property
    def label(self) -> str:
        return self.name


ModelSpec = GarchSpec | MarkovCopulaSpec | SreSpec


# ---------------------------------------------------------------------------
# Series container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesRequest:
    """Shape of a generated path: core length, padding lag, burn-in."""

    n: int
    max_lag: int = 5
    burn_in: int = 1000

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"core length must be >= 1, got {self.n}")
        if self.max_lag < 1:
            raise DomainError(f"max_lag must be >= 1, got {self.max_lag}")
        if self.burn_in < 0:
            raise DomainError(f"burn_in must be >= 0, got {self.burn_in}")

    @property
    def total(self) -> int:
        return self.n + 2 * self.max_lag


@dataclass(frozen=True)
class TimeSeries:
    """A realized path with padding; positions ``1 - max_lag .. n + max_lag``."""

    values: np.ndarray
    n: int
    max_lag: int
    model: str
    seed_info: tuple = ()

    def __post_init__(self):
        if len(self.values) != self.n + 2 * self.max_lag:
            raise DomainError(
                f"series length {len(self.values)} != n + 2*max_lag = "
                f"{self.n + 2 * self.max_lag}"
            )

    def at(self, i: int) -> float:
        """Value at time index ``i`` with ``1 - max_lag <= i <= n + max_lag``."""
        if not (1 - self.max_lag) <= i <= (self.n + self.max_lag):
            raise IndexError(f"time index {i} outside padded range")
        return float(self.values[i + self.max_lag - 1])

    def core(self) -> np.ndarray:
        """The observation window, positions 1..n."""
        return self.values[self.max_lag : self.max_lag + self.n]

    def abs_core(self) -> np.ndarray:
        return np.abs(self.core())

    def checksum(self) -> int:
        """Content hash of the raw path; used by the paired-design invariant."""
        return zlib.crc32(np.ascontiguousarray(self.values).tobytes())


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def _check_finite(raw: np.ndarray, req: SeriesRequest, what: str) -> None:
    bad = _kernels.first_nonfinite(raw)
    if bad >= 0:
        series_index = bad - req.burn_in + 1 - req.max_lag
        raise GenerationError(f"{what} produced a non-finite value", index=series_index)


def generate_garch(spec: GarchSpec, req: SeriesRequest, rng: np.random.Generator) -> TimeSeries:
    """Simulate a GARCH(1,1) path.

    The volatility starts at the stationary mean ``alpha0 / (1 - alpha1 - beta1)``
    when that exists (``alpha0`` otherwise) and the first ``burn_in`` steps are
    discarded.
    """
    total = req.burn_in + req.total
    eps = sample_innovation(spec.innovation, total, rng)
    ab = spec.alpha1 + spec.beta1
    sigma0_sq = spec.alpha0 / (1.0 - ab) if ab < 1.0 else spec.alpha0
    raw = _kernels.garch_recursion(eps, spec.alpha0, spec.alpha1, spec.beta1, sigma0_sq)
    _check_finite(raw, req, "GARCH recursion")
    return TimeSeries(raw[req.burn_in :], req.n, req.max_lag, spec.label)


def generate_markov_copula(
    spec: MarkovCopulaSpec, req: SeriesRequest, rng: np.random.Generator
) -> TimeSeries:
    """Simulate the copula Markov chain; the start is drawn exactly from the
    Student-t marginal, so the path is stationary from the first step."""
    total = req.burn_in + req.total
    nu = spec.marginal_nu
    if isinstance(spec.copula, TCopula):
        x0 = rng.standard_t(nu)
        tdraws = rng.standard_t(nu + 1.0, total)
        raw = _kernels.tcopula_recursion(tdraws, spec.copula.rho, nu, x0)
    else:
        u0 = rng.random()
        w = rng.random(total)
        u = _kernels.gumbel_chain(w, spec.copula.theta, u0)
        raw = student_t_quantile(nu, u)
    _check_finite(raw, req, "copula chain")
    return TimeSeries(raw[req.burn_in :], req.n, req.max_lag, spec.label)


def generate_sre(spec: SreSpec, req: SeriesRequest, rng: np.random.Generator) -> TimeSeries:
    """Simulate the affine recursion from ``X_0 = 0``; values are nonnegative."""
    total = req.burn_in + req.total
    c, d = spec.pair_sampler(rng, total)
    raw = _kernels.sre_recursion(c, d, 0.0)
    _check_finite(raw, req, "affine recursion")
    return TimeSeries(raw[req.burn_in :], req.n, req.max_lag, spec.label)


def generate(model: ModelSpec, req: SeriesRequest, rng: np.random.Generator) -> TimeSeries:
    """Dispatch on the model family."""
    if isinstance(model, GarchSpec):
        return generate_garch(model, req, rng)
    if isinstance(model, MarkovCopulaSpec):
        return generate_markov_copula(model, req, rng)
    if isinstance(model, SreSpec):
        return generate_sre(model, req, rng)
    raise TypeError(f"unknown model spec {type(model).__name__}")


def recommended_burn_in(model: ModelSpec) -> int:
    """Copula chains start exactly stationary; the recursions need warm-up."""
    return 0 if isinstance(model, MarkovCopulaSpec) else 1000


# ---------------------------------------------------------------------------
# Built-in SRE factories
# ---------------------------------------------------------------------------

def lognormal_sre(mu: float = -0.5, sigma: float = 1.0, d_mean: float = 1.0) -> SreSpec:
    """Lognormal multiplier ``log C ~ N(mu, sigma^2)`` with exponential additive part.

    The stationary tail index solves ``E[C^a] = 1``, i.e. ``a = -2 mu / sigma^2``.
    """
    if not sigma > 0 or not d_mean > 0:
        raise DomainError("sigma and d_mean must be positive")
    if not mu < 0:
        raise DomainError("mu must be negative for stationarity")

    def sampler(rng: np.random.Generator, size: int):
        c = np.exp(mu + sigma * rng.standard_normal(size))
        d = rng.exponential(d_mean, size)
        return c, d

    return SreSpec(sampler, name=f"sre-logn({mu:g},{sigma:g})")


def constant_factor_sre(c_value: float, d_mean: float = 1.0) -> SreSpec:
    """Degenerate multiplier ``C = c_value`` a.s.; exponential additive part."""
    if c_value < 0 or not c_value < 1:
        raise DomainError("constant factor must lie in [0, 1) for stationarity")

    def sampler(rng: np.random.Generator, size: int):
        c = np.full(size, float(c_value))
        d = rng.exponential(d_mean, size)
        return c, d

    return SreSpec(sampler, name=f"sre-const({c_value:g})")


def iid_pareto_sre(alpha: float) -> SreSpec:
    """iid standard Pareto observations expressed as a degenerate recursion (C = 0)."""
    if not alpha > 0:
        raise DomainError(f"tail index must be positive, got {alpha}")

    def sampler(rng: np.random.Generator, size: int):
        c = np.zeros(size)
        d = rng.random(size) ** (-1.0 / alpha)
        return c, d

    return SreSpec(
        sampler,
        name=f"iid-pareto({alpha:g})",
        quantile_fn=lambda beta: float((1.0 - beta) ** (-1.0 / alpha)),
    )
