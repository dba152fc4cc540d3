# Baseline Gaussian samplers.
"""Unconstrained MVN draws, closed-form conditional Gaussians, and the
conditioning-by-projection sampler.

``conditional_spec_cov`` and ``conditional_spec_prec`` are the covariance and
precision forms of the same conditional law; they agree up to round-off.
``sample_conditional_projection`` draws from that law without forming the
conditional covariance or factoring it: it perturbs a joint draw by
``S12 S22^{-1} (r - y2)``.
"""

from __future__ import annotations

from numpy.typing import ArrayLike

from core.linalg.kernels import cholesky, spd_solve
from core.models.covariance import CovarianceModel, FloatArray, as_vector
from core.models.exceptions import DimensionMismatchError
from core.models.gaussian_models import BlockGaussianSpec, GaussianSpec
from core.samplers.rng import RngState


def _draw_shape(dim: int, size: int | None) -> tuple[int, ...]:
    return (dim,) if size is None else (size, dim)


def sample_mvn(
    spec: GaussianSpec, rng: RngState, size: int | None = None
) -> FloatArray:
    """Return ``mean + L @ xi`` with ``xi`` standard normal and ``L = chol(cov)``.

    Diagonal covariances cost ``O(k)`` per draw.
    """

    xi = rng.standard_normal(_draw_shape(spec.dim, size))
    draws = cholesky(spec.cov).correlate(xi)
    draws += spec.mean
    return draws


def _conditioning_value(block: BlockGaussianSpec, r: ArrayLike) -> FloatArray:
    value = as_vector(r, "r")
    if value.shape[0] != block.k2:
        raise DimensionMismatchError(
            f"conditioning value has {value.shape[0]} entries, expected {block.k2}"
        )
    return value


def conditional_spec_cov(block: BlockGaussianSpec, r: ArrayLike) -> GaussianSpec:
    """Law of ``x1 | x2 = r`` in covariance form.

    Mean ``mu1 + S12 S22^{-1} (r - mu2)``, covariance ``S11 - S12 S22^{-1} S21``.
    """

    value = _conditioning_value(block, r)
    gain = spd_solve(block.s22_model, block.s21)
    mean = block.mu1 + gain.T @ (value - block.mu2)
    covariance = block.s11 - block.s12 @ gain
    return GaussianSpec(mean, CovarianceModel.dense(0.5 * (covariance + covariance.T)))


def conditional_spec_prec(block: BlockGaussianSpec, r: ArrayLike) -> GaussianSpec:
    """Law of ``x1 | x2 = r`` in precision form.

    With ``L = S^{-1}`` partitioned like ``S``: mean
    ``mu1 - L11^{-1} L12 (r - mu2)``, covariance ``L11^{-1}``.
    """

    value = _conditioning_value(block, r)
    precision = block.joint.cov.inverse().to_dense()
    k1 = block.k1
    lambda11 = CovarianceModel.dense(precision[:k1, :k1])
    lambda12 = precision[:k1, k1:]
    mean = block.mu1 - spd_solve(lambda11, lambda12 @ (value - block.mu2))
    return GaussianSpec(mean, lambda11.inverse())


def sample_conditional_projection(
    block: BlockGaussianSpec,
    r: ArrayLike,
    rng: RngState,
    size: int | None = None,
) -> FloatArray:
    """Draw ``x1 | x2 = r`` by drawing the joint and projecting.

    Samples ``y ~ N(mu, S)`` over all ``k`` coordinates and returns
    ``y1 + S12 S22^{-1} (r - y2)``.
    """

    value = _conditioning_value(block, r)
    joint_draw = sample_mvn(block.joint, rng, size)
    y1 = joint_draw[..., : block.k1]
    y2 = joint_draw[..., block.k1 :]
    gain = spd_solve(block.s22_model, block.s21)
    return y1 + (value - y2) @ gain


__all__ = [
    "conditional_spec_cov",
    "conditional_spec_prec",
    "sample_conditional_projection",
    "sample_mvn",
]
