"""Exception taxonomy shared across the package.

The CLI maps these onto distinct exit codes; library callers can catch
the common base class.
"""


class PdlError(Exception):
    """Base class for all package-specific errors."""


class DomainError(PdlError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class BoundError(DomainError):
    """An argument exceeds an implementation bound (sieve range, sweep cap)."""


class ConfigError(PdlError, ValueError):
    """Inconsistent model configuration (e.g. a prime factor above the cutoff)."""


class ConvergenceError(PdlError):
    """A requested tolerance cannot be met within the configured truncation."""


class AccuracyError(PdlError):
    """Quadrature failed to meet its tolerance; carries the achieved bound."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved bound {achieved:.3e})")
        self.achieved = achieved


class InsufficientSweepError(PdlError):
    """A computation needs class-number data beyond what was swept/cached."""


class CacheError(PdlError):
    """A cache file is missing, corrupt, or has an incompatible layout."""


class InternalInconsistencyError(PdlError):
    """An internal cross-check failed; indicates a bug, not bad input."""
