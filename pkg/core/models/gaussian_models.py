# Gaussian specifications consumed by the samplers.
"""Immutable parameter bundles for the unconstrained, conditional, hyperplane
and structured Gaussian samplers.

All validation happens at construction, so samplers can assume conforming
shapes and positive-definite blocks. Derived quantities that are reused by
every draw (cross gains, Schur complements, inner Woodbury systems) are
computed once and cached on the instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike

from core.linalg.kernels import cholesky, numerical_rank
from core.models.covariance import (
    CholeskyFactor,
    CovarianceModel,
    FloatArray,
    as_dense,
    as_vector,
    factor_dense,
)
from core.models.exceptions import (
    DimensionMismatchError,
    InvalidArgumentError,
    RankDeficientError,
)


@dataclass(frozen=True, eq=False)
class GaussianSpec:
    """Mean vector and covariance of ``x ~ N(mean, cov)``."""

    mean: FloatArray
    cov: CovarianceModel

    def __post_init__(self) -> None:
        mean = as_vector(self.mean, "mean")
        if mean.shape[0] != self.cov.dim:
            raise DimensionMismatchError(
                f"mean has {mean.shape[0]} entries, covariance has dim {self.cov.dim}"
            )
        object.__setattr__(self, "mean", mean)

    @classmethod
    def build(cls, mean: ArrayLike, cov: ArrayLike | CovarianceModel) -> GaussianSpec:
        model = cov if isinstance(cov, CovarianceModel) else CovarianceModel.dense(cov)
        return cls(as_vector(mean, "mean"), model)

    @property
    def dim(self) -> int:
        return self.cov.dim


@dataclass(frozen=True, eq=False)
class BlockGaussianSpec:
    """Partitioned joint Gaussian over ``(x1, x2)`` with ``S21 = S12.T`` implied.

    The assembled joint covariance is factored at construction, which both
    verifies positive definiteness and serves every later draw.
    """

    mu1: FloatArray
    mu2: FloatArray
    s11: FloatArray
    s12: FloatArray
    s22: FloatArray

    def __post_init__(self) -> None:
        mu1 = as_vector(self.mu1, "mu1")
        mu2 = as_vector(self.mu2, "mu2")
        s11 = as_dense(self.s11, "s11")
        s12 = as_dense(self.s12, "s12")
        s22 = as_dense(self.s22, "s22")
        k1, k2 = mu1.shape[0], mu2.shape[0]
        if s11.shape != (k1, k1) or s12.shape != (k1, k2) or s22.shape != (k2, k2):
            raise DimensionMismatchError(
                f"blocks {s11.shape}, {s12.shape}, {s22.shape} "
                f"do not match k1={k1}, k2={k2}"
            )
        blocks = {"mu1": mu1, "mu2": mu2, "s11": s11, "s12": s12, "s22": s22}
        for name, value in blocks.items():
            object.__setattr__(self, name, value)
        cholesky(self.joint.cov)

    @property
    def k1(self) -> int:
        return int(self.mu1.shape[0])

    @property
    def k2(self) -> int:
        return int(self.mu2.shape[0])

    @property
    def s21(self) -> FloatArray:
        return self.s12.T

    @cached_property
    def joint(self) -> GaussianSpec:
        covariance = np.block([[self.s11, self.s12], [self.s12.T, self.s22]])
        return GaussianSpec(
            np.concatenate([self.mu1, self.mu2]), CovarianceModel.dense(covariance)
        )

    @cached_property
    def s22_model(self) -> CovarianceModel:
        return CovarianceModel.dense(self.s22)


@dataclass(frozen=True, eq=False)
class HyperplaneConstraint:
    """The affine set ``{x : g @ x = r}`` with ``g`` of full row rank ``k2 < k``.

    Rank is verified once, from the singular values of ``g``.
    """

    g: FloatArray
    r: FloatArray

    def __post_init__(self) -> None:
        g = as_dense(self.g, "g")
        r = as_vector(self.r, "r")
        k2, k = g.shape
        if r.shape[0] != k2:
            raise DimensionMismatchError(f"r has {r.shape[0]} entries, g has {k2} rows")
        if k2 >= k:
            raise InvalidArgumentError(
                f"need fewer constraints than dimensions, got k2={k2}, k={k}"
            )
        rank = numerical_rank(g)
        if rank < k2:
            raise RankDeficientError(rank=rank, expected=k2)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "r", r)

    @classmethod
    def build(cls, g: ArrayLike, r: ArrayLike) -> HyperplaneConstraint:
        return cls(as_dense(g, "g"), as_vector(r, "r"))

    @property
    def k(self) -> int:
        return int(self.g.shape[1])

    @property
    def k2(self) -> int:
        return int(self.g.shape[0])


@dataclass(frozen=True, eq=False)
class StructuredCovSpec:
    """Target ``x1 ~ N(mu1, S11 - S12 S22^{-1} S21)`` given by its four blocks.

    Construction runs the block Cholesky of the joint ``[[S11, S12], [S21, S22]]``:
    it factors ``S11`` and the ``k2 x k2`` Schur complement
    ``S22 - S21 S11^{-1} S12``. The joint is SPD exactly when both succeed,
    which is also exactly when the target covariance is SPD.
    """

    mu1: FloatArray
    s11: CovarianceModel
    s12: FloatArray
    s22: CovarianceModel

    def __post_init__(self) -> None:
        mu1 = as_vector(self.mu1, "mu1")
        s12 = as_dense(self.s12, "s12")
        k1 = mu1.shape[0]
        if self.s11.dim != k1 or s12.shape != (k1, self.s22.dim):
            raise DimensionMismatchError(
                f"s11 dim {self.s11.dim}, s12 {s12.shape} and s22 dim {self.s22.dim} "
                f"do not match k1={k1}"
            )
        object.__setattr__(self, "mu1", mu1)
        object.__setattr__(self, "s12", s12)
        cholesky(self.s11)
        cholesky(self.s22)
        _ = self.schur_factor

    @property
    def k1(self) -> int:
        return int(self.mu1.shape[0])

    @property
    def k2(self) -> int:
        return self.s22.dim

    @cached_property
    def cross_gain(self) -> FloatArray:
        """``S21 S11^{-1}`` as a ``k2 x k1`` array; column scaling for diagonal S11."""

        if self.s11.is_diagonal:
            return self.s12.T / self.s11.diagonal_values[None, :]
        return self.s11.solve(self.s12).T

    @cached_property
    def correction_gain(self) -> FloatArray:
        """``S22^{-1} S21`` as a ``k2 x k1`` array."""

        return np.ascontiguousarray(self.s22.solve(self.s12.T))

    @cached_property
    def schur_factor(self) -> CholeskyFactor:
        schur = self.s22.to_dense() - self.cross_gain @ self.s12
        return CholeskyFactor(factor_dense(0.5 * (schur + schur.T)))

    def target_covariance(self) -> FloatArray:
        """Dense ``S11 - S12 S22^{-1} S21``; used by the naive baseline and oracles."""

        correction = self.s12 @ self.s22.solve(self.s12.T)
        target = self.s11.to_dense() - correction
        return 0.5 * (target + target.T)


@dataclass(frozen=True, eq=False)
class StructuredPrecSpec:
    """Target ``beta ~ N(mu_beta, (A + Phi^T Omega Phi)^{-1})``.

    ``a`` and ``omega`` are precision matrices. The ``n x n`` Woodbury system
    ``Omega^{-1} + Phi A^{-1} Phi^T`` is assembled and factored on first use.
    """

    mu_beta: FloatArray
    a: CovarianceModel
    phi: FloatArray
    omega: CovarianceModel

    def __post_init__(self) -> None:
        mu_beta = as_vector(self.mu_beta, "mu_beta")
        phi = as_dense(self.phi, "phi")
        p = mu_beta.shape[0]
        if self.a.dim != p or phi.shape != (self.omega.dim, p):
            raise DimensionMismatchError(
                f"a dim {self.a.dim}, phi {phi.shape} and omega dim {self.omega.dim} "
                f"do not match p={p}"
            )
        object.__setattr__(self, "mu_beta", mu_beta)
        object.__setattr__(self, "phi", phi)
        cholesky(self.a)
        cholesky(self.omega)

    @property
    def p(self) -> int:
        return int(self.mu_beta.shape[0])

    @property
    def n(self) -> int:
        return self.omega.dim

    @cached_property
    def a_inv_phi_t(self) -> FloatArray:
        """``A^{-1} Phi^T`` as a ``p x n`` array; row scaling when A is diagonal."""

        if self.a.is_diagonal:
            return self.phi.T / self.a.diagonal_values[:, None]
        return self.a.solve(self.phi.T)

    @cached_property
    def inner(self) -> CovarianceModel:
        """Factored ``Omega^{-1} + Phi A^{-1} Phi^T``."""

        system = self.phi @ self.a_inv_phi_t
        if self.omega.is_diagonal:
            system[np.diag_indices_from(system)] += 1.0 / self.omega.diagonal_values
        else:
            system += self.omega.inverse().to_dense()
        model = CovarianceModel.dense(0.5 * (system + system.T))
        cholesky(model)
        return model

    def posterior_precision(self) -> FloatArray:
        """Dense ``A + Phi^T Omega Phi``; used by the naive baseline and oracles."""

        precision = self.a.to_dense() + self.phi.T @ self.omega.matvec(self.phi)
        return 0.5 * (precision + precision.T)
