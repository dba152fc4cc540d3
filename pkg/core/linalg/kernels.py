# Linear algebra kernels consumed by every sampler.
"""Cholesky factorization, SPD solves, null-space bases and representation-aware
matrix products.

Every operation accepts either a dense ``numpy`` array or a :class:`DiagMatrix`
and dispatches on the representation. Diagonal-only paths stay ``O(dim)`` and
never build a dense matrix.
"""

from __future__ import annotations

from typing import Final

import numpy as np
import structlog
from numpy.typing import ArrayLike
from scipy.linalg import qr, svdvals

from core.models.covariance import (
    CholeskyFactor,
    CovarianceModel,
    DiagMatrix,
    FloatArray,
    as_dense,
    as_vector,
)
from core.models.exceptions import (
    DimensionMismatchError,
    InvalidArgumentError,
    RankDeficientError,
)

log = structlog.get_logger()

RANK_TOLERANCE: Final[float] = 1e-10

Operand = FloatArray | DiagMatrix


def cholesky(m: CovarianceModel) -> CholeskyFactor:
    """Return the lower-triangular factor ``L`` with ``L @ L.T == m``.

    The factor is cached on ``m``; diagonal inputs cost ``O(dim)``.

    Raises
    ------
    NotPositiveDefiniteError
        When a pivot is not positive; ``pivot`` holds its index.

    Examples
    --------
    >>> cholesky(CovarianceModel.diagonal([4.0, 9.0])).lower.diagonal
    array([2., 3.])
    """

    return m.factor


def spd_solve(m: CovarianceModel, b: ArrayLike) -> FloatArray:
    """Solve ``m @ alpha = b`` through the Cholesky factor and two triangular solves.

    ``b`` may be a vector or a ``(dim, n)`` block of right-hand sides.
    """

    rhs = np.asarray(b, dtype=np.float64)
    if rhs.shape[0] != m.dim:
        raise DimensionMismatchError(
            f"right-hand side has {rhs.shape[0]} rows, matrix has dim {m.dim}"
        )
    return m.solve(rhs)


def numerical_rank(g: ArrayLike) -> int:
    """Count singular values above ``RANK_TOLERANCE`` times the largest one."""

    singular_values = svdvals(as_dense(g, "g"))
    if singular_values.size == 0 or singular_values[0] == 0.0:
        return 0
    return int(np.sum(singular_values > RANK_TOLERANCE * singular_values[0]))


def null_space_basis(g: ArrayLike) -> FloatArray:
    """Return an orthonormal ``k x (k - k2)`` basis ``H1`` of the null space of ``g``.

    Computed from the complete Householder QR factorization of ``g.T``: the
    trailing ``k - k2`` columns of ``Q`` are orthogonal to the row space of
    ``g``. The result is deterministic for a fixed input.

    Raises
    ------
    RankDeficientError
        If ``g`` does not have full row rank ``k2 < k``.
    """

    matrix = as_dense(g, "g")
    k2, k = matrix.shape
    if k2 >= k:
        raise InvalidArgumentError(
            f"need fewer constraints than dimensions, got {k2}x{k}"
        )
    rank = numerical_rank(matrix)
    if rank < k2:
        raise RankDeficientError(rank=rank, expected=k2)

    q, _ = qr(matrix.T, mode="full")
    basis = np.ascontiguousarray(q[:, k2:])
    log.debug("linalg.null_space_basis", k=k, k2=k2)
    return basis


def _check_inner(left: tuple[int, ...], right: tuple[int, ...]) -> None:
    if left[-1] != right[0]:
        raise DimensionMismatchError(f"cannot multiply shapes {left} and {right}")


def _shape(a: Operand) -> tuple[int, int]:
    if isinstance(a, DiagMatrix):
        return (a.dim, a.dim)
    return (int(a.shape[0]), int(a.shape[1]))


def matmul(a: Operand, b: Operand) -> Operand:
    """Matrix product; diagonal factors become row or column scalings."""

    _check_inner(_shape(a), _shape(b))
    if isinstance(a, DiagMatrix) and isinstance(b, DiagMatrix):
        return DiagMatrix(a.diagonal * b.diagonal)
    if isinstance(a, DiagMatrix):
        return a.diagonal[:, None] * b
    if isinstance(b, DiagMatrix):
        return a * b.diagonal[None, :]
    return a @ b


def matvec(a: Operand, v: ArrayLike) -> FloatArray:
    vector = as_vector(v, "v")
    _check_inner(_shape(a), vector.shape)
    if isinstance(a, DiagMatrix):
        return a.diagonal * vector
    return a @ vector


def transpose(a: Operand) -> Operand:
    if isinstance(a, DiagMatrix):
        return a
    return a.T


def add(a: Operand, b: Operand) -> Operand:
    if _shape(a) != _shape(b):
        raise DimensionMismatchError(f"cannot add shapes {_shape(a)} and {_shape(b)}")
    if isinstance(a, DiagMatrix) and isinstance(b, DiagMatrix):
        return DiagMatrix(a.diagonal + b.diagonal)
    if isinstance(a, DiagMatrix):
        a, b = b, a
    if isinstance(b, DiagMatrix):
        result = np.array(a, dtype=np.float64, copy=True)
        result[np.diag_indices_from(result)] += b.diagonal
        return result
    return a + b


def scale(a: Operand, factor: float) -> Operand:
    if isinstance(a, DiagMatrix):
        if factor <= 0:
            raise InvalidArgumentError(
                "diagonal matrices only scale by positive factors"
            )
        return DiagMatrix(factor * a.diagonal)
    return factor * a
