# Shared pytest fixtures for all tests

from __future__ import annotations

from collections.abc import Callable

import numpy as np
import pytest
import structlog

from core.models.covariance import CovarianceModel, FloatArray
from core.models.gaussian_models import GaussianSpec, HyperplaneConstraint
from core.samplers.rng import RngState


@pytest.fixture
def rng() -> RngState:
    """Seeded stream; tests needing independent streams call ``rng.spawn``."""
    return RngState.from_seed(20240101)


@pytest.fixture
def np_rng() -> np.random.Generator:
    """Plain numpy generator for building test inputs."""
    return np.random.default_rng(12345)


@pytest.fixture
def worked_example() -> tuple[GaussianSpec, HyperplaneConstraint]:
    """Two-dimensional instance with ``x1 + x2 = 1``."""
    spec = GaussianSpec.build([1.0, 1.2], [[1.0, 0.3], [0.3, 1.0]])
    constraint = HyperplaneConstraint.build([[1.0, 1.0]], [1.0])
    return spec, constraint


@pytest.fixture
def make_spd(np_rng: np.random.Generator) -> Callable[[int], FloatArray]:
    """Factory for well-conditioned dense SPD matrices."""

    def build(k: int) -> FloatArray:
        a = np_rng.standard_normal((k, k))
        matrix = a @ a.T / k + np.eye(k)
        return 0.5 * (matrix + matrix.T)

    return build


@pytest.fixture
def make_hyperplane_instance(
    np_rng: np.random.Generator, make_spd: Callable[[int], FloatArray]
) -> Callable[..., tuple[GaussianSpec, HyperplaneConstraint]]:
    """Factory for random ``(spec, constraint)`` pairs, dense or diagonal."""

    def build(
        k: int, k2: int, diagonal: bool = False
    ) -> tuple[GaussianSpec, HyperplaneConstraint]:
        if diagonal:
            cov = CovarianceModel.diagonal(0.05 + np_rng.uniform(size=k))
        else:
            cov = CovarianceModel.dense(make_spd(k))
        spec = GaussianSpec(np_rng.standard_normal(k), cov)
        constraint = HyperplaneConstraint.build(
            np_rng.standard_normal((k2, k)), np_rng.standard_normal(k2)
        )
        return spec, constraint

    return build


@pytest.fixture(autouse=True)
def reset_structlog():
    """Restore structlog defaults after each test."""
    yield
    structlog.reset_defaults()
