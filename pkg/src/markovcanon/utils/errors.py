"""
Exception hierarchy for markovcanon

Every error raised by the library derives from MarkovCanonError, which is a
ValueError so callers validating input can keep catching ValueError.
Budget exhaustion is never an exception: it is reported in result objects.
"""

from typing import Optional


class MarkovCanonError(ValueError):
    """Base class for all markovcanon errors."""


class SgfParseError(MarkovCanonError):
    """Malformed SGF text. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphValidationError(MarkovCanonError):
    """A stochastic graph violates one of its structural invariants."""


class HomomorphismError(MarkovCanonError):
    """A candidate edge map is not a weight-preserving deterministic homomorphism."""


class ContractionError(MarkovCanonError):
    """A contraction result cannot be used (for example it was budget-truncated)."""


class ExtensionError(MarkovCanonError):
    """Invalid skew-product data or a failed lift."""


class ReductionError(MarkovCanonError):
    """A partition is not reducing, or persistent data is incomplete."""


class ClassificationError(MarkovCanonError):
    """Preconditions of the classification pipeline are not met."""


class UnsupportedError(MarkovCanonError):
    """The request exceeds a configured hard limit (for example d above d_max)."""


class CertificateError(MarkovCanonError):
    """A certificate file is malformed or does not re-validate."""
