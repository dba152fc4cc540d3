# Structured covariance and precision samplers.
"""Samplers for Gaussians whose covariance or precision has low-rank structure.

* ``N(mu1, S11 - S12 S22^{-1} S21)``: :func:`sample_structured_cov` draws it
  from a joint over ``k1 + k2`` coordinates followed by a ``k2 x k2`` solve,
  so neither the target covariance nor its factor is ever formed.
* ``N(mu_beta, (A + Phi^T Omega Phi)^{-1})``: :func:`sample_structured_prec`
  draws it through an ``n x n`` Woodbury system.

Each fast sampler has a naive baseline that forms and factors the dense
target. The Dirichlet-like simplex covariance ``a diag(phi1) - a phi1 phi1^T``
and the Bayesian regression posterior are provided as specializations.

All samplers share the batching convention of :mod:`core.samplers.mvn`:
``size=None`` returns one vector, an integer returns ``(size, dim)`` rows. The
fast samplers draw all standard normals for a call in one block, first
coordinates then the auxiliary ones.
"""

from __future__ import annotations

import numpy as np
import structlog
from numpy.typing import ArrayLike

from core.linalg.kernels import cholesky
from core.models.covariance import (
    CholeskyFactor,
    CovarianceModel,
    FloatArray,
    as_vector,
    factor_dense,
)
from core.models.exceptions import (
    DimensionMismatchError,
    InvalidArgumentError,
    InvalidSimplexError,
)
from core.models.gaussian_models import (
    GaussianSpec,
    StructuredCovSpec,
    StructuredPrecSpec,
)
from core.samplers.mvn import sample_mvn
from core.samplers.rng import RngState

log = structlog.get_logger()


def _noise(rng: RngState, dim: int, size: int | None) -> FloatArray:
    return rng.standard_normal((dim,) if size is None else (size, dim))


def sample_structured_cov(
    spec: StructuredCovSpec, rng: RngState, size: int | None = None
) -> FloatArray:
    """Draw ``x1 ~ N(mu1, S11 - S12 S22^{-1} S21)`` without forming that matrix.

    Draws ``y1 ~ N(0, S11)`` and ``y2 ~ N(0, S22 - S21 S11^{-1} S12)``, solves
    ``S22 alpha = S21 S11^{-1} y1 + y2`` and returns ``mu1 + y1 - S12 alpha``.
    The solve goes through the cached ``k2 x k1`` gain ``S22^{-1} S21``, so a
    batch costs two ``(n, k1) x (k1, k2)`` products. With diagonal ``S11`` no
    ``k1 x k1`` dense array is created.
    """

    xi = _noise(rng, spec.k1 + spec.k2, size)
    y1 = cholesky(spec.s11).correlate(xi[..., : spec.k1])
    rhs = y1 @ spec.cross_gain.T
    rhs += spec.schur_factor.correlate(xi[..., spec.k1 :])
    y1 -= rhs @ spec.correction_gain
    y1 += spec.mu1
    return y1


def naive_cov_factor(spec: StructuredCovSpec) -> CholeskyFactor:
    """Dense ``O(k1^3)`` factor of ``S11 - S12 S22^{-1} S21``."""

    log.debug("structured.naive_factored", dim=spec.k1)
    return CholeskyFactor(factor_dense(spec.target_covariance()))


def sample_structured_cov_naive(
    spec: StructuredCovSpec,
    rng: RngState,
    size: int | None = None,
    factor: CholeskyFactor | None = None,
) -> FloatArray:
    """Form ``S11 - S12 S22^{-1} S21``, factor it and sample.

    ``factor`` from :func:`naive_cov_factor` skips the factorization.
    """

    factor = factor if factor is not None else naive_cov_factor(spec)
    return spec.mu1 + factor.correlate(_noise(rng, spec.k1, size))


def _simplex_head(phi1: ArrayLike, a: float) -> FloatArray:
    weights = as_vector(phi1, "phi1")
    if np.any(weights <= 0):
        raise InvalidSimplexError("phi1 entries must be strictly positive")
    total = float(weights.sum())
    if total >= 1.0:
        raise InvalidSimplexError(f"phi1 must sum to less than 1, got {total!r}")
    if a <= 0:
        raise InvalidArgumentError(f"scale a must be positive, got {a}")
    return weights


def _head_mean(mu1: ArrayLike, weights: FloatArray) -> FloatArray:
    mean = as_vector(mu1, "mu1")
    if mean.shape != weights.shape:
        raise DimensionMismatchError(
            f"mu1 has {mean.shape[0]} entries, phi1 has {weights.shape[0]}"
        )
    return mean


def example3_spec(mu1: ArrayLike, a: float, phi1: ArrayLike) -> StructuredCovSpec:
    """Simplex covariance blocks ``S11 = a diag(phi1)``, ``S12 = phi1``, ``S22 = 1/a``.

    The implied target is ``a diag(phi1) - a phi1 phi1^T``.
    """

    weights = _simplex_head(phi1, a)
    mean = _head_mean(mu1, weights)
    return StructuredCovSpec(
        mu1=mean,
        s11=CovarianceModel.diagonal(a * weights),
        s12=weights[:, None],
        s22=CovarianceModel.diagonal([1.0 / a]),
    )


def sample_example3(
    mu1: ArrayLike,
    a: float,
    phi1: ArrayLike,
    rng: RngState,
    size: int | None = None,
) -> FloatArray:
    """Draw ``N(mu1, a diag(phi1) - a phi1 phi1^T)`` in ``O(k)``.

    Completes ``phi1`` and ``mu1`` with a last coordinate so both sum to one,
    draws ``y ~ N(mu, a diag(phi))`` over all ``k`` coordinates and returns the
    first ``k - 1`` coordinates of ``y + (1 - 1^T y) phi``.
    """

    weights = _simplex_head(phi1, a)
    mean = _head_mean(mu1, weights)
    phi = np.append(weights, 1.0 - weights.sum())
    mu = np.append(mean, 1.0 - mean.sum())
    y = _noise(rng, phi.shape[0], size)
    y *= np.sqrt(a * phi)
    y += mu
    y += (1.0 - y.sum(axis=-1, keepdims=True)) * phi
    return y[..., : weights.shape[0]]


def sample_example3_first_form(
    mu1: ArrayLike,
    a: float,
    phi1: ArrayLike,
    rng: RngState,
    size: int | None = None,
) -> FloatArray:
    """Same law through the block construction, written out in ``O(k)``.

    ``y1 ~ N(0, a diag(phi1))``, ``y2 ~ N(0, phi_k / a)``,
    ``x1 = mu1 + y1 - (1^T y1 + a y2) phi1``.
    """

    weights = _simplex_head(phi1, a)
    mean = _head_mean(mu1, weights)
    k1 = weights.shape[0]
    tail = 1.0 - weights.sum()
    xi = _noise(rng, k1 + 1, size)
    y1 = xi[..., :k1] * np.sqrt(a * weights)
    y2 = xi[..., k1:] * np.sqrt(tail / a)
    alpha = y1.sum(axis=-1, keepdims=True) + a * y2
    return mean + y1 - alpha * weights


def example3_naive_spec(mu1: ArrayLike, a: float, phi1: ArrayLike) -> GaussianSpec:
    """Dense ``N(mu1, a diag(phi1) - a phi1 phi1^T)``."""

    weights = _simplex_head(phi1, a)
    mean = _head_mean(mu1, weights)
    covariance = a * (np.diag(weights) - np.outer(weights, weights))
    return GaussianSpec(mean, CovarianceModel.dense(covariance))


def sample_example3_naive(
    mu1: ArrayLike,
    a: float,
    phi1: ArrayLike,
    rng: RngState,
    size: int | None = None,
) -> FloatArray:
    return sample_mvn(example3_naive_spec(mu1, a, phi1), rng, size)


def _prior_and_noise(
    spec: StructuredPrecSpec, rng: RngState, size: int | None
) -> tuple[FloatArray, FloatArray]:
    """``y1 ~ N(0, A^{-1})`` and ``y2 ~ N(0, Omega^{-1})`` from one noise block."""

    xi = _noise(rng, spec.p + spec.n, size)
    y1 = cholesky(spec.a).whiten_transpose(xi[..., : spec.p])
    y2 = cholesky(spec.omega).whiten_transpose(xi[..., spec.p :])
    return y1, y2


def sample_structured_prec(
    spec: StructuredPrecSpec, rng: RngState, size: int | None = None
) -> FloatArray:
    """Draw ``beta ~ N(mu_beta, (A + Phi^T Omega Phi)^{-1})`` via an ``n x n`` solve.

    Solves ``(Omega^{-1} + Phi A^{-1} Phi^T) alpha = Phi y1 + y2`` and returns
    ``mu_beta + y1 - A^{-1} Phi^T alpha``. The ``p x p`` posterior precision
    is never formed.
    """

    y1, y2 = _prior_and_noise(spec, rng, size)
    rhs = y1 @ spec.phi.T + y2
    alpha = spec.inner.solve(rhs.T).T
    return spec.mu_beta + y1 - alpha @ spec.a_inv_phi_t.T


def naive_prec_factor(spec: StructuredPrecSpec) -> CholeskyFactor:
    """Dense ``O(p^3)`` factor of ``A + Phi^T Omega Phi``."""

    log.debug("structured.naive_factored", dim=spec.p)
    return CholeskyFactor(factor_dense(spec.posterior_precision()))


def sample_structured_prec_naive(
    spec: StructuredPrecSpec,
    rng: RngState,
    size: int | None = None,
    factor: CholeskyFactor | None = None,
) -> FloatArray:
    """Form ``A + Phi^T Omega Phi``, factor it and sample.

    ``factor`` from :func:`naive_prec_factor` skips the factorization.
    """

    factor = factor if factor is not None else naive_prec_factor(spec)
    return spec.mu_beta + factor.whiten_transpose(_noise(rng, spec.p, size))


def sample_regression_posterior(
    spec: StructuredPrecSpec,
    t: ArrayLike,
    rng: RngState,
    size: int | None = None,
) -> FloatArray:
    """Regression posterior ``N((A + Phi^T Omega Phi)^{-1} Phi^T Omega t, ...)``.

    The prior mean is zero, so ``spec.mu_beta`` is ignored. Solves
    ``(Omega^{-1} + Phi A^{-1} Phi^T) alpha = t - Phi y1 - y2`` and returns
    ``y1 + A^{-1} Phi^T alpha``.
    """

    targets = as_vector(t, "t")
    if targets.shape[0] != spec.n:
        raise DimensionMismatchError(
            f"t has {targets.shape[0]} entries, expected n={spec.n}"
        )
    y1, y2 = _prior_and_noise(spec, rng, size)
    rhs = targets - y1 @ spec.phi.T - y2
    alpha = spec.inner.solve(rhs.T).T
    return y1 + alpha @ spec.a_inv_phi_t.T


def regression_posterior_mean(spec: StructuredPrecSpec, t: ArrayLike) -> FloatArray:
    """Dense oracle ``(A + Phi^T Omega Phi)^{-1} Phi^T Omega t``."""

    targets = as_vector(t, "t")
    precision = CovarianceModel.dense(spec.posterior_precision())
    return precision.solve(spec.phi.T @ spec.omega.matvec(targets))


__all__ = [
    "example3_naive_spec",
    "example3_spec",
    "naive_cov_factor",
    "naive_prec_factor",
    "regression_posterior_mean",
    "sample_example3",
    "sample_example3_first_form",
    "sample_example3_naive",
    "sample_regression_posterior",
    "sample_structured_cov",
    "sample_structured_cov_naive",
    "sample_structured_prec",
    "sample_structured_prec_naive",
]
