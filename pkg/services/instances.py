# Random problem instances for the benchmark and validation sweeps.
"""Seeded generators for the random instances used by every experiment.

Each generator is a pure function of its dimensions and an :class:`RngState`;
:func:`instance_rng` derives that state from ``(seed, experiment, grid point,
trial)``, so an instance can be rebuilt bit-for-bit from its CSV row.

Covariance recipes: a diagonal covariance has entries ``0.05 + U(0, 1)``; a
dense one is ``U^T diag(0.05 + U(0, 1)) U`` with ``U`` the orthogonal factor
of a standard-normal matrix.
"""

from __future__ import annotations

import zlib
from collections.abc import Sequence

import numpy as np
from scipy.linalg import qr

from core.models.bench_models import CovKind
from core.models.covariance import CovarianceModel, FloatArray
from core.models.exceptions import InvalidArgumentError
from core.models.gaussian_models import (
    GaussianSpec,
    HyperplaneConstraint,
    StructuredCovSpec,
    StructuredPrecSpec,
)
from core.samplers.rng import RngState, derive_seed

SPECTRUM_OFFSET = 0.05


def instance_seed(
    seed: int, experiment: str, point: Sequence[int], trial: int
) -> int:
    tag = zlib.crc32(experiment.encode("utf-8"))
    return derive_seed(seed, tag, *(int(value) for value in point), trial)


def instance_rng(
    seed: int, experiment: str, point: Sequence[int], trial: int
) -> RngState:
    return RngState.from_seed(instance_seed(seed, experiment, point, trial))


def random_spectrum(k: int, rng: RngState) -> FloatArray:
    return SPECTRUM_OFFSET + rng.uniform(0.0, 1.0, size=k)


def random_orthogonal(k: int, rng: RngState) -> FloatArray:
    q, _ = qr(rng.standard_normal((k, k)))
    return q


def random_covariance(k: int, kind: CovKind, rng: RngState) -> CovarianceModel:
    spectrum = random_spectrum(k, rng)
    if kind == "diag":
        return CovarianceModel.diagonal(spectrum)
    u = random_orthogonal(k, rng)
    return CovarianceModel.dense(u.T @ (spectrum[:, None] * u))


def random_hyperplane_instance(
    k: int, k2: int, kind: CovKind, rng: RngState
) -> tuple[GaussianSpec, HyperplaneConstraint]:
    """``mu``, ``r`` and ``G`` standard normal; rank is checked by the constraint."""

    if not 0 < k2 < k:
        raise InvalidArgumentError(f"need 0 < k2 < k, got k={k}, k2={k2}")
    cov = random_covariance(k, kind, rng)
    mean = rng.standard_normal(k)
    g = rng.standard_normal((k2, k))
    r = rng.standard_normal(k2)
    return GaussianSpec(mean, cov), HyperplaneConstraint(g, r)


def random_structured_cov_spec(
    k1: int, k2: int, kind: CovKind, rng: RngState
) -> StructuredCovSpec:
    """Joint-SPD blocks: ``S22 = S21 S11^{-1} S12 + W`` with ``W`` a random dense SPD.

    The Schur complement of the joint is ``W`` by construction.
    """

    if k1 < 1 or k2 < 1:
        raise InvalidArgumentError(f"need positive block sizes, got k1={k1}, k2={k2}")
    s11 = random_covariance(k1, kind, rng)
    s12 = rng.standard_normal((k1, k2)) / np.sqrt(k1)
    w = random_covariance(k2, "dense", rng).to_dense()
    if s11.is_diagonal:
        gain = s12.T / s11.diagonal_values[None, :]
    else:
        gain = s11.solve(s12).T
    s22 = gain @ s12 + w
    return StructuredCovSpec(
        mu1=rng.standard_normal(k1),
        s11=s11,
        s12=s12,
        s22=CovarianceModel.dense(0.5 * (s22 + s22.T)),
    )


def random_structured_prec_spec(
    p: int, n: int, rng: RngState, kind: CovKind = "diag"
) -> StructuredPrecSpec:
    """Diagonal (or dense) precisions ``A`` and ``Omega``; ``Phi`` standard normal."""

    if p < 1 or n < 1:
        raise InvalidArgumentError(f"need positive sizes, got p={p}, n={n}")
    return StructuredPrecSpec(
        mu_beta=rng.standard_normal(p),
        a=random_covariance(p, kind, rng),
        phi=rng.standard_normal((n, p)),
        omega=random_covariance(n, kind, rng),
    )


def example3_instance(
    k: int, rng: RngState, a: float = 0.5
) -> tuple[FloatArray, float, FloatArray]:
    """``phi ~ Dirichlet(1, ..., 1)`` over ``k`` coordinates, ``mu = 1/k``.

    Returns ``(mu1, a, phi1)`` for the first ``k - 1`` coordinates.
    """

    if k < 2:
        raise InvalidArgumentError(f"simplex instances need k >= 2, got {k}")
    phi = rng.generator.dirichlet(np.ones(k))
    phi = np.maximum(phi, np.finfo(np.float64).tiny)
    phi /= phi.sum()
    return np.full(k - 1, 1.0 / k), a, phi[:-1]
