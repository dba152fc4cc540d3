# SG-MCMC Service - residual curves for the simplex experiment.
"""Runs the fast and Gibbs SG-MCMC chains on one synthetic corpus.

All chains start from the uniform point, see the same minibatch schedule and
use independent noise streams. After every minibatch the service records the
residual ``||phi_true - phi_t||_2`` and the cumulative wall time spent in the
chain's update steps. The residual of the exact batch posterior mean is
reported as the ``batch_posterior_mean`` series, the floor the chains
approach.
"""

from __future__ import annotations

import time
from collections.abc import Callable
from typing import Any

import numpy as np
import structlog
from pydantic import BaseModel, Field, ValidationError, field_validator

from core.models.bench_models import ExperimentConfig, ResidualRecord
from core.models.exceptions import ConfigurationError
from core.models.sgmcmc_models import MinibatchCounts, SgmcmcConfig, SimplexState
from core.samplers.rng import RngState
from core.samplers.sgmcmc_simplex import (
    batch_posterior_mean,
    generate_synthetic_corpus,
    minibatch_counts,
    minibatch_schedule,
    residual_error,
    sgmcmc_step_fast,
    sgmcmc_step_gibbs,
)

log = structlog.get_logger()

FLOOR_ALGORITHM = "batch_posterior_mean"

Step = Callable[[SimplexState, MinibatchCounts, RngState], SimplexState]


class SgmcmcRunSettings(BaseModel):
    """Corpus and schedule settings of one residual-curve run."""

    v: int = Field(default=500, ge=2)
    n_docs: int = Field(default=5000, ge=1)
    n_spike: int = Field(default=10, ge=0)
    spike_value: float = Field(default=100.0, gt=0)
    poisson_mean: float = Field(default=50.0, gt=0)
    n_minibatches: int = Field(default=300, ge=0)
    gibbs_iters: list[int] = Field(default_factory=lambda: [1, 5, 10])
    chain: SgmcmcConfig = Field(default_factory=SgmcmcConfig)

    @field_validator("gibbs_iters", mode="before")
    @classmethod
    def _split_iters(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [int(item) for item in value.split(",") if item.strip()]
        if isinstance(value, int):
            return [value]
        return value

    @field_validator("gibbs_iters")
    @classmethod
    def _positive_iters(cls, value: list[int]) -> list[int]:
        if any(item < 1 for item in value):
            raise ValueError("Gibbs iteration counts must be at least 1")
        return value

    @classmethod
    def from_experiment(cls, config: ExperimentConfig) -> SgmcmcRunSettings:
        settings = dict(config.settings)
        chain_fields = ("eta", "step_exponent", "epsilon_floor", "minibatch_size")
        chain = {name: settings.pop(name) for name in chain_fields if name in settings}
        try:
            return cls(chain=SgmcmcConfig(seed=config.seed, **chain), **settings)
        except ValidationError as exc:
            raise ConfigurationError(f"invalid sgmcmc settings: {exc}") from exc


class SgmcmcService(BaseModel):
    """Produces residual-versus-minibatch and residual-versus-time series.

    Attributes
    ----------
    clock:
        Monotonic clock in seconds; injectable for tests.
    """

    clock: Callable[[], float] = time.perf_counter

    class Config:
        """Pydantic configuration."""

        arbitrary_types_allowed = True

    def _methods(self, settings: SgmcmcRunSettings) -> dict[str, Step]:
        chain = settings.chain
        methods: dict[str, Step] = {
            "sgmcmc_fast": lambda state, batch, rng: sgmcmc_step_fast(
                state, batch, chain, rng
            )
        }
        for iters in settings.gibbs_iters:
            methods[f"sgmcmc_gibbs{iters}"] = (
                lambda state, batch, rng, iters=iters: sgmcmc_step_gibbs(
                    state, batch, chain, iters, rng
                )
            )
        return methods

    def run(self, settings: SgmcmcRunSettings) -> list[ResidualRecord]:
        """Run every chain over the shared schedule and collect residual rows.

        Zero minibatches produce no rows at all.
        """

        base = RngState.from_seed(settings.chain.seed)
        true_phi, docs = generate_synthetic_corpus(
            settings.v,
            settings.n_docs,
            settings.n_spike,
            settings.spike_value,
            settings.poisson_mean,
            base.spawn(0),
        )
        if settings.n_minibatches == 0:
            log.info("sgmcmc.no_minibatches")
            return []

        schedule = minibatch_schedule(
            settings.n_docs,
            settings.chain.minibatch_size,
            settings.n_minibatches,
            base.spawn(1),
        )
        batches = [minibatch_counts(docs, indices) for indices in schedule]
        floor = residual_error(
            batch_posterior_mean(docs, settings.chain.eta), true_phi
        )
        records = [
            ResidualRecord(
                algorithm=FLOOR_ALGORITHM,
                minibatch=index,
                cumulative_time_ms=0.0,
                residual=floor,
            )
            for index in sorted({1, settings.n_minibatches})
        ]

        for offset, (name, step) in enumerate(self._methods(settings).items()):
            noise = base.spawn(2, offset)
            state = SimplexState.uniform(settings.v)
            elapsed_ms = 0.0
            step_times = []
            for index, batch in enumerate(batches, start=1):
                start = self.clock()
                state = step(state, batch, noise)
                duration = (self.clock() - start) * 1e3
                step_times.append(duration)
                elapsed_ms += duration
                records.append(
                    ResidualRecord(
                        algorithm=name,
                        minibatch=index,
                        cumulative_time_ms=elapsed_ms,
                        residual=residual_error(state.phi, true_phi),
                    )
                )
            log.info(
                "sgmcmc.chain_finished",
                algorithm=name,
                minibatches=len(batches),
                median_step_ms=float(np.median(step_times)),
                final_residual=records[-1].residual,
                floor=floor,
            )
        return records
