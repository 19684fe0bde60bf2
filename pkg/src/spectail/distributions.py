"""Probability laws used by the time-series models.

Student-t cdf/quantile are built on the regularized incomplete beta function;
the quantile inverts the cdf with a safeguarded Newton iteration seeded by a
normal-quantile approximation, so it works on scalars and arrays alike.

Innovations come in two flavours: standard normal and standardized Student-t
(unit variance, ``nu > 2``).  The power-tilted innovation with density
``h(x) = g(x) |x|^a / E|eps|^a`` is sampled exactly: for a normal base the
squared draw is Gamma distributed, for a t base the squared draw is a scaled
beta-prime variable, so no numeric inversion is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, gammaln, ndtri

from .errors import DomainError

__all__ = [
    "StandardNormal",
    "StandardizedT",
    "InnovationSpec",
    "TiltedInnovationSpec",
    "student_t_pdf",
    "student_t_cdf",
    "student_t_quantile",
    "sample_innovation",
    "sample_tilted_innovation",
    "pareto_from_uniform",
    "sample_standard_pareto",
    "gamma_sample",
]


# ---------------------------------------------------------------------------
# Student-t special functions
# ---------------------------------------------------------------------------

def student_t_pdf(nu: float, x):
    """Density of the Student-t distribution with ``nu`` degrees of freedom."""
    if not nu > 0:
        raise DomainError(f"degrees of freedom must be positive, got {nu}")
    x = np.asarray(x, dtype=float)
    lognorm = gammaln((nu + 1.0) / 2.0) - gammaln(nu / 2.0) - 0.5 * np.log(nu * np.pi)
    out = np.exp(lognorm - 0.5 * (nu + 1.0) * np.log1p(x * x / nu))
    return out if out.ndim else float(out)


def _t_tail(nu: float, x):
    """P{T > x} for x >= 0, via the regularized incomplete beta function."""
    x = np.asarray(x, dtype=float)
    z = nu / (nu + x * x)
    return 0.5 * betainc(nu / 2.0, 0.5, z)


def student_t_cdf(nu: float, x):
    """Student-t cdf; symmetric, so ``cdf(-x) == 1 - cdf(x)`` exactly."""
    if not nu > 0:
        raise DomainError(f"degrees of freedom must be positive, got {nu}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("cdf argument must be finite")
    tail = _t_tail(nu, np.abs(x))
    out = np.where(x >= 0, 1.0 - tail, tail)
    return out if out.ndim else float(out)


def student_t_quantile(nu: float, p):
    """Inverse of :func:`student_t_cdf`.

    Solves ``cdf(x) = p`` by Newton iteration on the upper tail, seeded by the
    normal quantile (plus a power-tail seed for extreme levels), with bisection
    safeguarding.  Odd symmetry about ``p = 0.5`` holds exactly.
    """
    if not nu > 0:
        raise DomainError(f"degrees of freedom must be positive, got {nu}")
    p_arr = np.asarray(p, dtype=float)
    scalar = p_arr.ndim == 0
    p_arr = np.atleast_1d(p_arr).astype(float)
    if np.any(~np.isfinite(p_arr)) or np.any(p_arr <= 0.0) or np.any(p_arr >= 1.0):
        raise DomainError("quantile level must lie strictly inside (0, 1)")

    sign = np.where(p_arr >= 0.5, 1.0, -1.0)
    q = np.where(p_arr >= 0.5, 1.0 - p_arr, p_arr)  # upper-tail mass, in (0, 0.5]
    x = np.zeros_like(q)
    active = q < 0.5  # q == 0.5 -> exactly 0

    if np.any(active):
        x[active] = _t_upper_quantile(nu, q[active])
    out = sign * x
    return float(out[0]) if scalar else out


def _t_upper_quantile(nu: float, q: np.ndarray) -> np.ndarray:
    # Normal-quantile seed; for deep tails switch to the power-tail inverse.
    seed = -ndtri(q)
    if nu > 2:
        seed = seed * np.sqrt(nu / (nu - 2.0))
    # Power-tail inverse of tail(x) ~ C * nu^((nu-1)/2) * x^(-nu), C the density norm.
    logc = gammaln((nu + 1.0) / 2.0) - gammaln(nu / 2.0) - 0.5 * np.log(nu * np.pi)
    tail_seed = np.exp((logc + 0.5 * (nu - 1.0) * np.log(nu) - np.log(q)) / nu)
    x = np.maximum(np.maximum(seed, 0.5 * tail_seed), 1e-8)

    lo = np.zeros_like(q)
    hi = x.copy()
    need = _t_tail(nu, hi) > q
    while np.any(need):
        hi[need] *= 2.0
        need[need] = _t_tail(nu, hi[need]) > q[need]

    converged = np.zeros(q.shape, dtype=bool)
    x = np.clip(x, lo, hi)
    for _ in range(200):
        idx = ~converged
        if not np.any(idx):
            break
        xi = x[idx]
        f = _t_tail(nu, xi) - q[idx]
        lo_i, hi_i = lo[idx], hi[idx]
        above = f > 0  # tail too large -> root lies to the right
        lo_i = np.where(above, xi, lo_i)
        hi_i = np.where(above, hi_i, xi)
        step = f / student_t_pdf(nu, xi)
        x_new = xi + step
        bad = (x_new <= lo_i) | (x_new >= hi_i) | ~np.isfinite(x_new)
        x_new = np.where(bad, 0.5 * (lo_i + hi_i), x_new)
        exact = f == 0.0
        x_new = np.where(exact, xi, x_new)  # betainc hit the target: keep the root
        small_step = np.abs(x_new - xi) <= 1e-12 * np.maximum(1.0, np.abs(x_new))
        small_resid = np.abs(f) <= 1e-12 * np.maximum(q[idx], 1e-3)
        collapsed = (hi_i - lo_i) <= 4e-16 * np.maximum(1.0, np.abs(x_new))
        done = (small_step & small_resid) | exact | collapsed
        lo[idx], hi[idx], x[idx] = lo_i, hi_i, x_new
        converged[idx] = done
    return x


# ---------------------------------------------------------------------------
# Innovation laws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StandardNormal:
    """Standard normal innovations."""

    def __str__(self) -> str:
        return "normal"


@dataclass(frozen=True)
class StandardizedT:
    """Student-t innovations rescaled to unit variance; requires ``nu > 2``."""

    nu: float

    def __post_init__(self):
        if not self.nu > 2:
            raise DomainError(
                f"standardized t needs nu > 2 for unit variance, got nu={self.nu}"
            )

    @property
    def scale(self) -> float:
        return float(np.sqrt((self.nu - 2.0) / self.nu))

    def __str__(self) -> str:
        return f"t{self.nu:g}"


InnovationSpec = StandardNormal | StandardizedT


@dataclass(frozen=True)
class TiltedInnovationSpec:
    """Innovation law reweighted by ``|x|^alpha`` (density ``g(x)|x|^a / E|eps|^a``)."""

    base: InnovationSpec
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"tilt exponent must be positive, got {self.alpha}")
        if isinstance(self.base, StandardizedT) and self.alpha >= self.base.nu:
            raise DomainError(
                f"tilt exponent {self.alpha} >= nu {self.base.nu}: "
                "normalizer E|eps|^alpha is infinite"
            )


def sample_innovation(
    spec: InnovationSpec, size: int, rng: np.random.Generator
) -> np.ndarray:
    """iid draws with mean 0 and variance 1 under ``spec``."""
    if isinstance(spec, StandardNormal):
        return rng.standard_normal(size)
    return rng.standard_t(spec.nu, size) * spec.scale


def sample_tilted_innovation(
    spec: TiltedInnovationSpec, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Exact draws from the ``|x|^alpha``-tilted innovation law.

    Normal base: ``draw^2 ~ Gamma((alpha+1)/2, scale=2)``.  Standardized-t
    base: ``draw^2 / (nu-2)`` is beta-prime, i.e. ``B/(1-B)`` with
    ``B ~ Beta((alpha+1)/2, (nu-alpha)/2)``.  Signs are symmetric.
    """
    a = spec.alpha
    if isinstance(spec.base, StandardNormal):
        sq = rng.gamma((a + 1.0) / 2.0, 2.0, size)
    else:
        nu = spec.base.nu
        b = rng.beta((a + 1.0) / 2.0, (nu - a) / 2.0, size)
        sq = (nu - 2.0) * b / (1.0 - b)
    signs = rng.integers(0, 2, size) * 2.0 - 1.0
    return signs * np.sqrt(sq)


# ---------------------------------------------------------------------------
# Pareto and Gamma
# ---------------------------------------------------------------------------

def pareto_from_uniform(alpha: float, u):
    """Inverse-cdf map ``u -> u^(-1/alpha)`` onto the standard Pareto law."""
    if not alpha > 0:
        raise DomainError(f"tail index must be positive, got {alpha}")
    u = np.asarray(u, dtype=float)
    out = u ** (-1.0 / alpha)
    return out if out.ndim else float(out)


def sample_standard_pareto(alpha: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draws with survival function ``x^(-alpha)`` on ``[1, inf)``."""
    if not alpha > 0:
        raise DomainError(f"tail index must be positive, got {alpha}")
    return pareto_from_uniform(alpha, rng.random(size))


def gamma_sample(shape: float, scale: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Gamma draws with the given shape and scale."""
    if not (shape > 0 and scale > 0):
        raise DomainError(f"gamma parameters must be positive, got {shape}, {scale}")
    return rng.gamma(shape, scale, size)
