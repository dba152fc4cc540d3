# Covariance value types for the sampling core.
"""Dense and diagonal covariance representations with cached Cholesky factors.

Diagonal matrices are a first-class representation: every method dispatches on
the representation so that diagonal inputs never materialize a dense ``k x k``
array unless :meth:`CovarianceModel.to_dense` is called explicitly.

Batches follow two conventions. Sampling helpers (:meth:`CholeskyFactor.correlate`
and :meth:`CholeskyFactor.whiten_transpose`) take draws as rows of an
``(n, k)`` array. Linear-system helpers (:meth:`CholeskyFactor.solve` and
:meth:`CovarianceModel.matvec`) take right-hand sides as columns of a
``(k, m)`` array, like :func:`scipy.linalg.cho_solve`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Final

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import cho_solve, lapack, solve_triangular

from core.models.exceptions import (
    DimensionMismatchError,
    InvalidArgumentError,
    NotPositiveDefiniteError,
)

FloatArray = NDArray[np.float64]

SYMMETRY_TOLERANCE: Final[float] = 1e-12


def as_vector(values: ArrayLike, name: str = "vector") -> FloatArray:
    """Coerce ``values`` to a finite 1-D float64 array."""

    array = np.asarray(values, dtype=np.float64)
    if array.ndim == 0:
        array = array.reshape(1)
    if array.ndim != 1:
        raise DimensionMismatchError(f"{name} must be 1-D, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise InvalidArgumentError(f"{name} contains non-finite entries")
    return array


def as_dense(values: ArrayLike, name: str = "matrix") -> FloatArray:
    """Coerce ``values`` to a finite 2-D float64 array."""

    array = np.asarray(values, dtype=np.float64)
    if array.ndim == 1:
        array = array.reshape(1, -1)
    if array.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise InvalidArgumentError(f"{name} contains non-finite entries")
    return array


def factor_dense(matrix: FloatArray) -> FloatArray:
    """Return the lower Cholesky factor of a dense SPD matrix.

    Raises
    ------
    NotPositiveDefiniteError
        With the zero-based index of the first non-positive pivot.
    """

    lower, info = lapack.dpotrf(matrix, lower=1, clean=1)
    if info > 0:
        raise NotPositiveDefiniteError(pivot=info - 1)
    if info < 0:
        raise InvalidArgumentError(f"potrf rejected argument {-info}")
    return np.asarray(lower, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class DiagMatrix:
    """Diagonal matrix stored as its strictly positive diagonal."""

    diagonal: FloatArray

    def __post_init__(self) -> None:
        values = as_vector(self.diagonal, "diagonal")
        if np.any(values <= 0):
            raise InvalidArgumentError("diagonal entries must be strictly positive")
        object.__setattr__(self, "diagonal", values)

    @property
    def dim(self) -> int:
        return int(self.diagonal.shape[0])

    def to_dense(self) -> FloatArray:
        return np.diag(self.diagonal)


@dataclass(frozen=True, eq=False)
class CholeskyFactor:
    """Lower-triangular factor ``L`` of an SPD matrix ``L @ L.T``."""

    lower: FloatArray | DiagMatrix

    @property
    def is_diagonal(self) -> bool:
        return isinstance(self.lower, DiagMatrix)

    @property
    def dim(self) -> int:
        if isinstance(self.lower, DiagMatrix):
            return self.lower.dim
        return int(self.lower.shape[0])

    def correlate(self, xi: FloatArray) -> FloatArray:
        """Return ``L @ xi`` for a vector, or for every row of an ``(n, k)`` batch."""

        if isinstance(self.lower, DiagMatrix):
            return xi * self.lower.diagonal
        return xi @ self.lower.T

    def whiten_transpose(self, xi: FloatArray) -> FloatArray:
        """Return ``L^{-T} @ xi`` row-wise; draws ``N(0, (L L^T)^{-1})`` from noise."""

        if isinstance(self.lower, DiagMatrix):
            return xi / self.lower.diagonal
        solved = solve_triangular(
            self.lower,
            np.atleast_2d(xi).T,
            lower=True,
            trans="T",
            check_finite=False,
        )
        return solved.T.reshape(xi.shape)

    def solve(self, rhs: FloatArray) -> FloatArray:
        """Solve ``(L L^T) x = rhs`` for a vector or ``(k, m)`` column block."""

        if isinstance(self.lower, DiagMatrix):
            squared = self.lower.diagonal**2
            if rhs.ndim == 1:
                return rhs / squared
            return rhs / squared[:, None]
        return cho_solve((self.lower, True), rhs, check_finite=False)

    def reconstruct(self) -> FloatArray:
        if isinstance(self.lower, DiagMatrix):
            return np.diag(self.lower.diagonal**2)
        return self.lower @ self.lower.T


@dataclass(frozen=True, eq=False)
class CovarianceModel:
    """Symmetric positive-definite matrix in dense or diagonal representation.

    Dense inputs whose asymmetry is within ``SYMMETRY_TOLERANCE`` (relative to
    the largest entry) are symmetrized as ``(m + m.T) / 2``; larger asymmetry is
    rejected. Dense inputs are factored at construction, so a matrix that is
    not positive definite raises ``NotPositiveDefiniteError`` immediately; the
    factor is cached for the lifetime of the instance.
    """

    representation: FloatArray | DiagMatrix

    def __post_init__(self) -> None:
        if isinstance(self.representation, DiagMatrix):
            return
        matrix = as_dense(self.representation, "covariance")
        if matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(
                f"covariance must be square, got shape {matrix.shape}"
            )
        scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
        asymmetry = float(np.max(np.abs(matrix - matrix.T))) if matrix.size else 0.0
        if asymmetry > SYMMETRY_TOLERANCE * max(scale, 1e-300):
            raise InvalidArgumentError(
                f"covariance is not symmetric (max asymmetry {asymmetry:.3e})"
            )
        object.__setattr__(self, "representation", 0.5 * (matrix + matrix.T))
        _ = self.factor

    @classmethod
    def dense(cls, matrix: ArrayLike) -> CovarianceModel:
        return cls(as_dense(matrix, "covariance"))

    @classmethod
    def diagonal(cls, values: ArrayLike) -> CovarianceModel:
        return cls(DiagMatrix(as_vector(values, "diagonal")))

    @property
    def is_diagonal(self) -> bool:
        return isinstance(self.representation, DiagMatrix)

    @property
    def dim(self) -> int:
        if isinstance(self.representation, DiagMatrix):
            return self.representation.dim
        return int(self.representation.shape[0])

    @property
    def diagonal_values(self) -> FloatArray:
        """Main diagonal, without materializing a dense matrix."""

        if isinstance(self.representation, DiagMatrix):
            return self.representation.diagonal
        return np.diag(self.representation).copy()

    @cached_property
    def factor(self) -> CholeskyFactor:
        if isinstance(self.representation, DiagMatrix):
            return CholeskyFactor(DiagMatrix(np.sqrt(self.representation.diagonal)))
        return CholeskyFactor(factor_dense(self.representation))

    def to_dense(self) -> FloatArray:
        if isinstance(self.representation, DiagMatrix):
            return self.representation.to_dense()
        return self.representation

    def matvec(self, rhs: FloatArray) -> FloatArray:
        """Return ``M @ rhs`` for a vector or ``(k, m)`` column block."""

        if isinstance(self.representation, DiagMatrix):
            diagonal = self.representation.diagonal
            return rhs * diagonal if rhs.ndim == 1 else rhs * diagonal[:, None]
        return self.representation @ rhs

    def solve(self, rhs: FloatArray) -> FloatArray:
        return self.factor.solve(rhs)

    def inverse(self) -> CovarianceModel:
        """Explicit inverse; diagonal stays diagonal, dense goes through the factor."""

        if isinstance(self.representation, DiagMatrix):
            return CovarianceModel.diagonal(1.0 / self.representation.diagonal)
        return CovarianceModel.dense(self.solve(np.eye(self.dim)))

    def scaled(self, factor: float) -> CovarianceModel:
        if factor <= 0:
            raise InvalidArgumentError("covariance scale must be positive")
        if isinstance(self.representation, DiagMatrix):
            return CovarianceModel.diagonal(factor * self.representation.diagonal)
        return CovarianceModel.dense(factor * self.representation)
