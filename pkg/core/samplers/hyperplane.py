# Hyperplane-truncated Gaussian samplers.
"""Exact sampling of ``x ~ N(mu, S)`` restricted to ``{x : G x = r}``.

Two exact samplers are provided:

* :func:`sample_naive` changes variables to ``z = H^{-1} x`` with
  ``G H = (0, G H2)``. The constraint then fixes ``z2 = (G H2)^{-1} r`` and
  ``z1`` is drawn from its Gaussian conditional. The transform and its
  factorizations live in a :class:`TransformCache` that can be reused across
  draws sharing ``(S, G)``.
* :func:`sample_fast` draws an unconstrained ``y ~ N(mu, S)`` and applies the
  affine projection ``x = y + S G^T (G S G^T)^{-1} (r - G y)``. It never builds
  ``H`` and never inverts ``S``.

:func:`sample_simplex_diag` is the ``O(k)`` specialization of the projection to
``G = 1^T``, ``r = 1`` and ``S = a diag(phi)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import structlog
from numpy.typing import ArrayLike
from scipy.linalg import inv, lu_factor, lu_solve, qr

from core.linalg.kernels import cholesky, null_space_basis, numerical_rank, spd_solve
from core.models.covariance import (
    CholeskyFactor,
    CovarianceModel,
    FloatArray,
    as_dense,
    as_vector,
)
from core.models.exceptions import (
    DimensionMismatchError,
    InvalidArgumentError,
    InvalidSimplexError,
    RankDeficientError,
)
from core.models.gaussian_models import GaussianSpec, HyperplaneConstraint
from core.samplers.mvn import sample_mvn
from core.samplers.rng import RngState

log = structlog.get_logger()

NULL_SPACE_TOLERANCE = 1e-10
SIMPLEX_TOLERANCE = 1e-10


def _check_conforming(spec: GaussianSpec, c: HyperplaneConstraint) -> None:
    if c.k != spec.dim:
        raise DimensionMismatchError(
            f"constraint acts on {c.k} coordinates, Gaussian has dim {spec.dim}"
        )


@dataclass(frozen=True, eq=False)
class TransformCache:
    """Change of variables ``x = H z`` with ``H = (h1, h2)`` and its factorizations.

    Depends on ``(S, G)`` only; ``mu`` and ``r`` enter at draw time. Immutable
    and safe to share between threads.
    """

    h1: FloatArray
    h2: FloatArray
    h_inv: FloatArray
    gh2_lu: tuple[FloatArray, FloatArray]
    lambda11: CovarianceModel
    lambda12: FloatArray

    @property
    def k1(self) -> int:
        return int(self.h1.shape[1])

    @property
    def lambda11_factor(self) -> CholeskyFactor:
        return cholesky(self.lambda11)

    def fixed_coordinates(self, r: FloatArray) -> FloatArray:
        """``z2 = (G H2)^{-1} r``."""

        return lu_solve(self.gh2_lu, r)

    def free_mean(self, mu: FloatArray, z2: FloatArray) -> FloatArray:
        """Mean of ``z1 | z2``.

        ``m1 - Lambda11^{-1} Lambda12 (z2 - m2)`` with ``m = H^{-1} mu``.
        """

        m = self.h_inv @ mu
        shift = self.lambda12 @ (z2 - m[self.k1 :])
        return m[: self.k1] - spd_solve(self.lambda11, shift)


def _greedy_completion(g: FloatArray) -> FloatArray:
    """Standard basis columns picked by column-pivoted QR of ``g``."""

    k2, k = g.shape
    _, _, pivots = qr(g, mode="economic", pivoting=True)
    return np.eye(k)[:, pivots[:k2]]


def make_transform_cache(
    spec: GaussianSpec,
    c: HyperplaneConstraint,
    h1: ArrayLike | None = None,
    h2: ArrayLike | None = None,
) -> TransformCache:
    """Build ``H = (H1, H2)`` and precompute every factorization ``sample_naive`` needs.

    ``H1`` defaults to an orthonormal null-space basis of ``G``. ``H2`` defaults
    to ``k2`` standard basis vectors chosen by greedy column pivoting on ``G``,
    so ``G H2`` is a well-conditioned column subset of ``G``. Either block may
    be supplied explicitly; it must still satisfy ``G H1 = 0`` and have
    ``G H2`` invertible.

    Raises
    ------
    RankDeficientError
        If ``G H2`` is singular.
    InvalidArgumentError
        If a supplied ``H1`` is not in the null space of ``G``.
    """

    _check_conforming(spec, c)
    k, k2 = c.k, c.k2
    basis = null_space_basis(c.g) if h1 is None else as_dense(h1, "h1")
    if h1 is not None and basis.shape[0] == 1 and k > 1:
        basis = basis.T
    completion = _greedy_completion(c.g) if h2 is None else as_dense(h2, "h2")
    if h2 is not None and completion.shape[0] == 1 and k > 1:
        completion = completion.T
    if basis.shape != (k, k - k2) or completion.shape != (k, k2):
        raise DimensionMismatchError(
            f"H blocks {basis.shape} and {completion.shape} do not fit k={k}, k2={k2}"
        )

    residual = float(np.max(np.abs(c.g @ basis))) if basis.size else 0.0
    if residual > NULL_SPACE_TOLERANCE:
        raise InvalidArgumentError(f"G @ h1 is not zero (max entry {residual:.3e})")
    gh2 = c.g @ completion
    rank = numerical_rank(gh2)
    if rank < k2:
        raise RankDeficientError(rank=rank, expected=k2)

    h = np.hstack([basis, completion])
    if spec.cov.is_diagonal:
        sigma_inv_h = h / spec.cov.diagonal_values[:, None]
    else:
        sigma_inv_h = spd_solve(spec.cov, h)
    precision = h.T @ sigma_inv_h
    k1 = k - k2
    lambda11 = CovarianceModel.dense(
        0.5 * (precision[:k1, :k1] + precision[:k1, :k1].T)
    )

    log.debug("hyperplane.cache_built", k=k, k2=k2, explicit_h=h1 is not None)
    return TransformCache(
        h1=basis,
        h2=completion,
        h_inv=inv(h),
        gh2_lu=lu_factor(gh2),
        lambda11=lambda11,
        lambda12=precision[:k1, k1:],
    )


def sample_naive(
    spec: GaussianSpec,
    c: HyperplaneConstraint,
    rng: RngState,
    cache: TransformCache | None = None,
    size: int | None = None,
) -> FloatArray:
    """Draw from the truncated law through the ``H`` transform.

    Returns ``H1 z1 + H2 z2`` with ``z2 = (G H2)^{-1} r`` and
    ``z1 ~ N(mu_z1, Lambda11^{-1})``. Pass ``cache`` to amortize the transform
    over repeated calls.
    """

    _check_conforming(spec, c)
    cache = cache if cache is not None else make_transform_cache(spec, c)
    z2 = cache.fixed_coordinates(c.r)
    mean_z1 = cache.free_mean(spec.mean, z2)
    shape = (cache.k1,) if size is None else (size, cache.k1)
    xi = rng.standard_normal(shape)
    z1 = mean_z1 + cache.lambda11_factor.whiten_transpose(xi)
    return z1 @ cache.h1.T + cache.h2 @ z2


class HyperplaneProjector:
    """Precomputed gain ``(G S G^T)^{-1} G S`` for repeated projections.

    Projecting a batch then costs two ``(n, k) x (k, k2)`` products. With
    diagonal ``S`` the setup is ``O(k2^2 k)`` without a dense ``k x k`` matrix.
    """

    def __init__(self, cov: CovarianceModel, g: ArrayLike) -> None:
        matrix = as_dense(g, "g")
        if matrix.shape[1] != cov.dim:
            raise DimensionMismatchError(
                f"g has {matrix.shape[1]} columns, covariance has dim {cov.dim}"
            )
        self.g = matrix
        self.sigma_gt = cov.matvec(np.ascontiguousarray(matrix.T))
        gram = matrix @ self.sigma_gt
        self.gram = CovarianceModel.dense(0.5 * (gram + gram.T))
        self.gain = np.ascontiguousarray(self.gram.solve(self.sigma_gt.T))

    def project(self, y: FloatArray, r: ArrayLike) -> FloatArray:
        """Map ``y`` (vector or ``(n, k)`` rows) onto ``{x : G x = r}``."""

        return self.project_inplace(np.array(y, dtype=np.float64), r)

    def project_inplace(self, y: FloatArray, r: ArrayLike) -> FloatArray:
        """Like :meth:`project` but overwrites and returns ``y``."""

        residual = y @ self.g.T
        np.subtract(as_vector(r, "r"), residual, out=residual)
        y += residual @ self.gain
        return y

    def operator(self, r: ArrayLike) -> tuple[FloatArray, FloatArray]:
        """Return ``(offset, matrix)`` with ``project(y) == offset + matrix @ y``."""

        offset = self.sigma_gt @ self.gram.solve(as_vector(r, "r"))
        identity = np.eye(self.sigma_gt.shape[0])
        matrix = identity - self.gain.T @ self.g
        return offset, matrix


def sample_fast(
    spec: GaussianSpec,
    c: HyperplaneConstraint,
    rng: RngState,
    size: int | None = None,
    projector: HyperplaneProjector | None = None,
) -> FloatArray:
    """Draw ``y ~ N(mu, S)`` and project it onto the hyperplane.

    ``projector`` may be shared across calls with the same ``(S, G)``.

    Examples
    --------
    >>> spec = GaussianSpec.build([1.0, 1.2], [[1.0, 0.3], [0.3, 1.0]])
    >>> c = HyperplaneConstraint.build([[1.0, 1.0]], [1.0])
    >>> x = sample_fast(spec, c, RngState.from_seed(0))
    >>> bool(abs(x.sum() - 1.0) < 1e-12)
    True
    """

    _check_conforming(spec, c)
    if projector is None:
        projector = HyperplaneProjector(spec.cov, c.g)
    return projector.project_inplace(sample_mvn(spec, rng, size), c.r)


def project_fast(
    spec: GaussianSpec, c: HyperplaneConstraint, y: ArrayLike
) -> FloatArray:
    """Project a given ``y``; the deterministic half of ``sample_fast``."""

    _check_conforming(spec, c)
    values = np.asarray(y, dtype=np.float64)
    return HyperplaneProjector(spec.cov, c.g).project(values, c.r)


def projection_operator(
    spec: GaussianSpec, c: HyperplaneConstraint
) -> tuple[FloatArray, FloatArray]:
    _check_conforming(spec, c)
    return HyperplaneProjector(spec.cov, c.g).operator(c.r)


def analytic_moments(
    spec: GaussianSpec,
    c: HyperplaneConstraint,
    cache: TransformCache | None = None,
) -> tuple[FloatArray, FloatArray]:
    """Mean and (singular) covariance of the truncated law.

    Mean ``H1 mu_z1 + H2 z2``, covariance ``H1 Lambda11^{-1} H1^T``.
    """

    cache = cache if cache is not None else make_transform_cache(spec, c)
    z2 = cache.fixed_coordinates(c.r)
    mean = cache.h1 @ cache.free_mean(spec.mean, z2) + cache.h2 @ z2
    covariance = cache.h1 @ spd_solve(cache.lambda11, cache.h1.T)
    return mean, 0.5 * (covariance + covariance.T)


def check_simplex_weights(phi: ArrayLike) -> FloatArray:
    weights = as_vector(phi, "phi")
    if np.any(weights <= 0):
        raise InvalidSimplexError("simplex weights must be strictly positive")
    total = float(weights.sum())
    if abs(total - 1.0) > SIMPLEX_TOLERANCE:
        raise InvalidSimplexError(f"simplex weights sum to {total!r}, expected 1")
    return weights


def sample_simplex_diag(
    mu: ArrayLike,
    a: float,
    phi: ArrayLike,
    rng: RngState,
    size: int | None = None,
) -> FloatArray:
    """Draw ``N(mu, a diag(phi))`` truncated to ``1^T x = 1`` in ``O(k)``.

    Consumes the random stream exactly like :func:`sample_fast` with
    ``G = 1^T``, ``r = 1`` and diagonal covariance ``a * phi``.
    """

    weights = check_simplex_weights(phi)
    mean = as_vector(mu, "mu")
    if mean.shape != weights.shape:
        raise DimensionMismatchError(
            f"mu has {mean.shape[0]} entries, phi has {weights.shape[0]}"
        )
    if a <= 0:
        raise InvalidArgumentError(f"scale a must be positive, got {a}")
    k = weights.shape[0]
    y = rng.standard_normal((k,) if size is None else (size, k))
    y *= np.sqrt(a * weights)
    y += mean
    y += (1.0 - y.sum(axis=-1, keepdims=True)) * weights
    return y


__all__ = [
    "HyperplaneProjector",
    "TransformCache",
    "analytic_moments",
    "check_simplex_weights",
    "make_transform_cache",
    "project_fast",
    "projection_operator",
    "sample_fast",
    "sample_naive",
    "sample_simplex_diag",
]
