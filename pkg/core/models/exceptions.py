# Custom exception hierarchy for the sampling core.
"""Domain-specific exceptions raised by the linear algebra kernels and samplers."""

from __future__ import annotations


class SamplerError(Exception):
    """Base class for all sampling library errors."""


class NotPositiveDefiniteError(SamplerError):
    """Raised when a Cholesky factorization meets a non-positive pivot."""

    def __init__(self, pivot: int, message: str | None = None) -> None:
        self.pivot = pivot
        super().__init__(
            message or f"Matrix is not positive definite (failing pivot {pivot})"
        )


class DimensionMismatchError(SamplerError):
    """Raised when operands do not have conforming shapes."""


class RankDeficientError(SamplerError):
    """Raised when a constraint matrix does not have full row rank."""

    def __init__(self, rank: int, expected: int) -> None:
        self.rank = rank
        self.expected = expected
        super().__init__(f"Numerical rank {rank} is below the required {expected}")


class InvalidSimplexError(SamplerError):
    """Raised when a probability vector violates the simplex preconditions."""


class InvalidArgumentError(SamplerError):
    """Raised when an argument is outside the documented domain."""


class ValidationFailedError(SamplerError):
    """Raised when the statistical validation battery reports a failure."""


class ParseError(SamplerError):
    """Raised when a benchmark CSV cannot be parsed."""

    def __init__(self, line: int, message: str) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}")


class ConfigurationError(SamplerError):
    """Raised when experiment configuration is invalid or missing."""
