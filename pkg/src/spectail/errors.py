"""Exception types raised across the package."""


class SpectailError(Exception):
    """Base class for all package-specific errors."""


class DomainError(SpectailError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class GenerationError(SpectailError):
    """Series generation failed (non-finite state, non-convergence)."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message if index is None else f"{message} (at index {index})")
        self.index = index


class NoExceedancesError(SpectailError):
    """An estimator was evaluated on an empty exceedance set."""


class UnsupportedLagError(SpectailError, ValueError):
    """Requested lag exceeds the padding of the series or is not available."""


class NoRootError(SpectailError):
    """A moment equation has no root in the searched bracket."""


class UnreliableCIError(SpectailError):
    """Too many bootstrap replicates were degenerate to trust the interval."""
