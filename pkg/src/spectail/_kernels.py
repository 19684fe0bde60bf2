"""Compiled inner loops for the serial parts of series generation.

All randomness is drawn outside (vectorized numpy) and passed in as arrays, so
results are bit-identical with or without JIT compilation.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def garch_recursion(eps, alpha0, alpha1, beta1, sigma0_sq):
    """Volatility recursion; returns the observation path."""
    n = eps.shape[0]
    x = np.empty(n)
    s = sigma0_sq
    for i in range(n):
        xi = np.sqrt(s) * eps[i]
        x[i] = xi
        s = alpha0 + alpha1 * xi * xi + beta1 * s
    return x


@njit(cache=True)
def sre_recursion(c, d, x0):
    """Affine recursion x_t = c_t * x_{t-1} + d_t."""
    n = c.shape[0]
    x = np.empty(n)
    prev = x0
    for i in range(n):
        prev = c[i] * prev + d[i]
        x[i] = prev
    return x


@njit(cache=True)
def tcopula_recursion(tdraws, rho, nu, x0):
    """Markov chain with t marginal and bivariate-t copula, on the t scale.

    Conditional law: x_t = rho*x_{t-1} + sqrt((nu + x_{t-1}^2)(1-rho^2)/(nu+1)) * T
    with T a t(nu+1) draw.
    """
    n = tdraws.shape[0]
    x = np.empty(n)
    prev = x0
    f = (1.0 - rho * rho) / (nu + 1.0)
    for i in range(n):
        prev = rho * prev + np.sqrt((nu + prev * prev) * f) * tdraws[i]
        x[i] = prev
    return x


@njit(cache=True, inline="always")
def _gumbel_cond_cdf(la, lb, theta):
    """Conditional copula cdf v -> dC/du for the Gumbel-Hougaard family.

    Arguments are la = -log(u), lb = -log(v); computed in log space so extreme
    corners of the unit square stay finite.
    """
    log_a = theta * np.log(la)
    log_b = theta * np.log(lb)
    m = log_a if log_a > log_b else log_b
    log_apb = m + np.log(np.exp(log_a - m) + np.exp(log_b - m))
    s = np.exp(log_apb / theta)
    log_h = -s + (1.0 / theta - 1.0) * log_apb + (theta - 1.0) * np.log(la) + la
    return np.exp(log_h)


@njit(cache=True, inline="always")
def _gumbel_cond_inverse(u, w, theta):
    """Solve dC/du(u, v) = w for v on (0, 1).

    The conditional cdf is strictly increasing in v, so bisection is
    unconditionally safe; after 18 halvings a bracketed Newton iteration
    finishes the root to ~1e-14.
    """
    la = -np.log(u)
    log_la = np.log(la)
    log_a = theta * log_la
    lo = 0.0
    hi = 1.0
    for _ in range(18):
        mid = 0.5 * (lo + hi)
        if _gumbel_cond_cdf(la, -np.log(mid), theta) < w:
            lo = mid
        else:
            hi = mid
    v = 0.5 * (lo + hi)
    for _ in range(40):
        lb = -np.log(v)
        log_b = theta * np.log(lb)
        m = log_a if log_a > log_b else log_b
        log_apb = m + np.log(np.exp(log_a - m) + np.exp(log_b - m))
        s = np.exp(log_apb / theta)
        h = np.exp(-s + (1.0 / theta - 1.0) * log_apb + (theta - 1.0) * log_la + la)
        if h < w:
            lo = v
        else:
            hi = v
        # d(log h)/d(lb) = (g/theta) * (1 - theta - s),  g = d(log(a+b))/d(lb)
        g = theta * np.exp((theta - 1.0) * np.log(lb) - log_apb)
        dh_dv = h * (g / theta) * (1.0 - theta - s) * (-1.0 / v)
        v_new = v - (h - w) / dh_dv if dh_dv != 0.0 else 0.5 * (lo + hi)
        if not (lo < v_new < hi):
            v_new = 0.5 * (lo + hi)
        if abs(v_new - v) <= 1e-14 * (v + 1e-12):
            v = v_new
            break
        v = v_new
    # keep v strictly inside (0,1) so marginal quantiles stay finite
    if v < 1e-300:
        v = 1e-300
    if v > 1.0 - 1e-16:
        v = 1.0 - 1e-16
    return v


@njit(cache=True, inline="always")
def _clip_unit(u):
    if u < 1e-300:
        return 1e-300
    if u > 1.0 - 1e-16:
        return 1.0 - 1e-16
    return u


@njit(cache=True)
def gumbel_chain(uniforms, theta, u0):
    """Uniform-scale trajectory of the Gumbel-copula Markov chain."""
    n = uniforms.shape[0]
    u = np.empty(n)
    prev = _clip_unit(u0)
    for i in range(n):
        prev = _gumbel_cond_inverse(prev, uniforms[i], theta)
        u[i] = prev
    return u


@njit(cache=True)
def gumbel_cond_inverse_array(u, w, theta):
    """Vectorized one-step conditional inversion (for tail-conditioned rollouts)."""
    n = u.shape[0]
    v = np.empty(n)
    for i in range(n):
        v[i] = _gumbel_cond_inverse(_clip_unit(u[i]), w[i], theta)
    return v


@njit(cache=True)
def first_nonfinite(x):
    """Index of the first non-finite entry, or -1 if all entries are finite."""
    for i in range(x.shape[0]):
        if not np.isfinite(x[i]):
            return i
    return -1
