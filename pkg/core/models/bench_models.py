# Benchmark and validation data models.
"""Pydantic contracts for benchmark rows, residual curves, experiment settings
and validation reports.

These are the shapes written to CSV, read back by the plotting command and
returned by the validation battery.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

CovKind = Literal["dense", "diag"]
RecordCovKind = Literal["dense", "diagonal"]

BENCH_COLUMNS: tuple[str, ...] = (
    "experiment",
    "algorithm",
    "k",
    "k1",
    "k2",
    "n",
    "p",
    "trial",
    "seed",
    "n_samples",
    "wall_time_ms",
    "cov_kind",
)

RESIDUAL_COLUMNS: tuple[str, ...] = (
    "experiment",
    "algorithm",
    "minibatch",
    "cumulative_time_ms",
    "residual",
)


class BenchRecord(BaseModel):
    """One timed measurement; dimensions an experiment does not use are ``None``."""

    model_config = ConfigDict(frozen=True)

    experiment: str = Field(..., min_length=1)
    algorithm: str = Field(..., min_length=1)
    k: int | None = Field(default=None, ge=1)
    k1: int | None = Field(default=None, ge=1)
    k2: int | None = Field(default=None, ge=1)
    n: int | None = Field(default=None, ge=1)
    p: int | None = Field(default=None, ge=1)
    trial: int = Field(..., ge=0)
    seed: int
    n_samples: int = Field(..., ge=1)
    wall_time_ms: float = Field(..., gt=0)
    cov_kind: RecordCovKind

    @property
    def per_sample_ms(self) -> float:
        return self.wall_time_ms / self.n_samples


class ResidualRecord(BaseModel):
    """Residual ``||phi_ref - phi_t||_2`` after a minibatch of an SG-MCMC run."""

    model_config = ConfigDict(frozen=True)

    experiment: str = Field(default="sgmcmc", min_length=1)
    algorithm: str = Field(..., min_length=1)
    minibatch: int = Field(..., ge=0)
    cumulative_time_ms: float = Field(..., ge=0)
    residual: float = Field(..., ge=0)


class ExperimentConfig(BaseModel):
    """Resolved settings of one CLI invocation."""

    experiment: str
    seed: int = 0
    trials: int = Field(default=3, ge=1)
    samples: int = Field(default=1000, ge=1)
    repetitions: int = Field(default=3, ge=1)
    workers: int = Field(default=1, ge=1)
    cov: CovKind = "diag"
    grid: dict[str, list[float]] = Field(default_factory=dict)
    algorithms: list[str] = Field(default_factory=list)
    sweep: Literal["general", "example3"] = "general"
    settings: dict[str, float | int | str] = Field(default_factory=dict)

    @field_validator("grid")
    @classmethod
    def _non_empty_axes(cls, grid: dict[str, list[float]]) -> dict[str, list[float]]:
        for name, values in grid.items():
            if not values:
                raise ValueError(f"grid axis '{name}' has no values")
        return grid


class MomentMatchReport(BaseModel):
    passed: bool
    n: int
    max_mean_z: float = Field(
        ..., description="Largest |mean error| in units of its standard error"
    )
    mean_failures: list[int] = Field(default_factory=list)
    cov_relative_error: float
    cov_tolerance: float


class KSResult(BaseModel):
    statistic: float = Field(..., ge=0, le=1)
    p_value: float = Field(..., ge=0, le=1)


class KSBatteryResult(BaseModel):
    """Per-coordinate two-sample KS tests with a Bonferroni-corrected level."""

    passed: bool
    alpha: float
    corrected_alpha: float
    results: list[KSResult]

    @property
    def min_p_value(self) -> float:
        return min((result.p_value for result in self.results), default=1.0)


class ValidationCheck(BaseModel):
    name: str
    passed: bool
    detail: dict[str, float | int | str | bool] = Field(default_factory=dict)


class ValidationReport(BaseModel):
    checks: list[ValidationCheck] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> list[str]:
        return [check.name for check in self.checks if not check.passed]
