# SG-MCMC data models for the simplex sampler.
"""State, minibatch statistics and configuration for SG-MCMC on the simplex.

:class:`SimplexState` and :class:`MinibatchCounts` are numeric value types
validated at construction. :class:`SgmcmcConfig` is a pydantic model so it can
be populated from YAML, a ``--config`` file and CLI flags alike.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, Field, field_validator

from core.models.covariance import FloatArray, as_vector
from core.models.exceptions import InvalidArgumentError, InvalidSimplexError

SIMPLEX_SUM_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class SimplexState:
    """Current point ``phi`` of the chain, the running ``M`` estimate and step count.

    ``phi`` has ``V`` strictly positive entries summing to one. The reduced
    vector of the first ``V - 1`` entries is exposed as :attr:`reduced`.
    """

    phi: FloatArray
    m_estimate: float = 1.0
    step_index: int = 0

    def __post_init__(self) -> None:
        phi = as_vector(self.phi, "phi")
        if phi.shape[0] < 2:
            raise InvalidSimplexError("a simplex state needs at least two coordinates")
        if np.any(phi <= 0):
            raise InvalidSimplexError("phi entries must be strictly positive")
        total = float(phi.sum())
        if abs(total - 1.0) > SIMPLEX_SUM_TOLERANCE:
            raise InvalidSimplexError(f"phi sums to {total!r}, expected 1")
        if not self.m_estimate > 0:
            raise InvalidArgumentError(f"M must be positive, got {self.m_estimate}")
        if self.step_index < 0:
            raise InvalidArgumentError("step index must be nonnegative")
        object.__setattr__(self, "phi", phi)

    @classmethod
    def uniform(cls, v: int, m_estimate: float = 1.0) -> SimplexState:
        return cls(np.full(v, 1.0 / v), m_estimate=m_estimate)

    @property
    def v(self) -> int:
        return int(self.phi.shape[0])

    @property
    def reduced(self) -> FloatArray:
        return self.phi[:-1]


@dataclass(frozen=True, eq=False)
class MinibatchCounts:
    """Word counts summed over a minibatch, with ``rho = N / |minibatch|``."""

    n_colon: NDArray[np.int64]
    n_total: int
    rho: float

    def __post_init__(self) -> None:
        counts = np.asarray(self.n_colon)
        if counts.ndim != 1:
            raise InvalidArgumentError("n_colon must be a 1-D count vector")
        if np.any(counts < 0):
            raise InvalidArgumentError("counts must be nonnegative")
        counts = counts.astype(np.int64)
        if int(counts.sum()) != self.n_total:
            raise InvalidArgumentError(
                f"n_total={self.n_total} does not equal the count sum "
                f"{int(counts.sum())}"
            )
        if not self.rho > 0:
            raise InvalidArgumentError(f"rho must be positive, got {self.rho}")
        object.__setattr__(self, "n_colon", counts)

    @classmethod
    def from_counts(cls, counts: ArrayLike, rho: float = 1.0) -> MinibatchCounts:
        array = np.asarray(counts, dtype=np.int64)
        return cls(n_colon=array, n_total=int(array.sum()), rho=rho)

    @property
    def reduced(self) -> NDArray[np.int64]:
        return self.n_colon[:-1]


class SgmcmcConfig(BaseModel):
    """Hyperparameters of the SG-MCMC chain.

    Attributes
    ----------
    eta:
        Dirichlet concentration of the prior.
    step_exponent:
        Step sizes are ``t ** -step_exponent``; must lie in ``(0.5, 1]``.
    epsilon_floor:
        Lower clip applied when a projected draw leaves the positive orthant.
    minibatch_size:
        Documents per minibatch.
    seed:
        Base seed for minibatch shuffles and chain noise.
    """

    eta: float = Field(default=0.1, gt=0)
    step_exponent: float = Field(default=0.99)
    epsilon_floor: float = Field(default=1e-10, ge=0)
    minibatch_size: int = Field(default=50, ge=1)
    seed: int = Field(default=0)

    @field_validator("step_exponent")
    @classmethod
    def _check_step_exponent(cls, value: float) -> float:
        if not 0.5 < value <= 1.0:
            raise ValueError("step_exponent must lie in (0.5, 1]")
        return value
