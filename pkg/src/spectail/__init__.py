"""Spectral tail process estimation for heavy-tailed stationary time series.

The package covers the full pipeline used to study serial extremal
dependence: simulators for GARCH, copula Markov chains and affine recursions;
forward/backward/Hill estimators over deterministic or order-statistic
thresholds; a multiplier block bootstrap; ground-truth and pre-asymptotic
quantities; limit-theory diagnostics; and a reproducible simulation-study
harness with a CLI (``spectail --help``).
"""

from .distributions import (
    InnovationSpec,
    StandardNormal,
    StandardizedT,
    TiltedInnovationSpec,
    student_t_cdf,
    student_t_quantile,
)
from .errors import (
    DomainError,
    GenerationError,
    NoExceedancesError,
    NoRootError,
    SpectailError,
    UnreliableCIError,
    UnsupportedLagError,
)
from .estimators import (
    Deterministic,
    EstimateRecord,
    ExceedanceSet,
    OrderStatistic,
    QuantileLevel,
    backward_cdf,
    forward_cdf,
    hill_alpha,
    resolve_threshold,
    tail_array_sum,
)
from .models import (
    GarchSpec,
    GumbelHougaard,
    MarkovCopulaSpec,
    SeriesRequest,
    SreSpec,
    TCopula,
    TimeSeries,
    generate,
)
from .streams import derive_seed, make_stream

__version__ = "0.1.0"
