"""Shared fixtures: model specs, precise tail indices, cached quantile tables."""

from __future__ import annotations

import numpy as np
import pytest

from spectail.distributions import StandardizedT
from spectail.models import GarchSpec, GumbelHougaard, MarkovCopulaSpec, TCopula
from spectail.streams import make_stream
from spectail.truth import garch_tail_index_quadrature, marginal_quantile


@pytest.fixture(scope="session")
def ngarch() -> GarchSpec:
    return GarchSpec(0.1, 0.14, 0.84)


@pytest.fixture(scope="session")
def tgarch() -> GarchSpec:
    return GarchSpec(0.1, 0.14, 0.84, StandardizedT(4))


@pytest.fixture(scope="session")
def tcop025() -> MarkovCopulaSpec:
    return MarkovCopulaSpec(4, TCopula(4, 0.25))


@pytest.fixture(scope="session")
def gumcop12() -> MarkovCopulaSpec:
    return MarkovCopulaSpec(4, GumbelHougaard(1.2))


@pytest.fixture(scope="session")
def alpha_ngarch(ngarch) -> float:
    return garch_tail_index_quadrature(ngarch).alpha


@pytest.fixture(scope="session")
def alpha_tgarch(tgarch) -> float:
    return garch_tail_index_quadrature(tgarch).alpha


@pytest.fixture(scope="session")
def garch_quantiles(ngarch, tgarch):
    """Desk-scale Monte Carlo quantile table for both GARCH models."""
    table = {}
    for spec in (ngarch, tgarch):
        for beta in (0.9, 0.95):
            est = marginal_quantile(
                spec, beta, m=10**6, repetitions=20,
                rng=make_stream(0xF1C, ("fixture-quantile", spec.label, str(beta))),
            )
            table[(spec.label, beta)] = est
    return table
