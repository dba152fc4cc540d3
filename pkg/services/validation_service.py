# Validation Service - statistical checks behind ``mvn-bench validate``.
"""Registry of sampler checks and the runner that executes them.

Every check builds a small random instance, draws ``samples`` variates from a
fast sampler and compares them with an exact reference: the analytic moments,
the dense baseline, or the same stream pushed through an equivalent sampler.
Each check runs once per trial on an independent instance. KS levels are
Bonferroni-corrected over coordinates and trials.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from typing import Final

import numpy as np
import structlog
from pydantic import BaseModel, Field, ValidationError

from core.models.bench_models import (
    CovKind,
    ExperimentConfig,
    ValidationCheck,
    ValidationReport,
)
from core.models.covariance import CovarianceModel
from core.models.exceptions import ConfigurationError, ValidationFailedError
from core.models.gaussian_models import GaussianSpec, HyperplaneConstraint
from core.samplers.hyperplane import (
    analytic_moments,
    sample_fast,
    sample_naive,
    sample_simplex_diag,
)
from core.samplers.rng import RngState
from core.samplers.structured import (
    example3_naive_spec,
    regression_posterior_mean,
    sample_example3,
    sample_example3_first_form,
    sample_regression_posterior,
    sample_structured_cov,
    sample_structured_cov_naive,
    sample_structured_prec,
)
from core.validation.statistics import (
    KS_ALPHA,
    constraint_residual,
    ks_battery,
    moment_match_report,
)
from services.instances import (
    example3_instance,
    instance_rng,
    random_hyperplane_instance,
    random_structured_cov_spec,
    random_structured_prec_spec,
)

log = structlog.get_logger()

CONSTRAINT_TOLERANCE: Final[float] = 1e-8
EQUALITY_TOLERANCE: Final[float] = 1e-10


class ValidationSettings(BaseModel):
    """Sizes of the validation instances."""

    seed: int = 0
    trials: int = Field(default=5, ge=1)
    samples: int = Field(default=100_000, ge=2)
    cov: CovKind = "diag"
    hyperplane_k: int = Field(default=30, ge=2)
    hyperplane_k2: int = Field(default=5, ge=1)
    structured_k1: int = Field(default=20, ge=1)
    structured_k2: int = Field(default=5, ge=1)
    prec_p: int = Field(default=20, ge=1)
    prec_n: int = Field(default=8, ge=1)
    ks_coordinates: int = Field(default=5, ge=1)

    @classmethod
    def from_experiment(cls, config: ExperimentConfig) -> ValidationSettings:
        try:
            return cls(
                seed=config.seed,
                trials=config.trials,
                samples=config.samples,
                cov=config.cov,
                **config.settings,
            )
        except ValidationError as exc:
            raise ConfigurationError(f"invalid validation settings: {exc}") from exc

    @property
    def ks_alpha(self) -> float:
        return KS_ALPHA / self.trials


Check = Callable[[ValidationSettings, RngState], ValidationCheck]


def _coordinates(k: int, limit: int) -> list[int]:
    return list(range(min(k, limit)))


def check_hyperplane_equivalence(
    settings: ValidationSettings, rng: RngState
) -> ValidationCheck:
    """Both hyperplane samplers match each other and the analytic moments."""

    spec, c = random_hyperplane_instance(
        settings.hyperplane_k, settings.hyperplane_k2, settings.cov, rng.spawn(0)
    )
    fast = sample_fast(spec, c, rng.spawn(1), size=settings.samples)
    naive = sample_naive(spec, c, rng.spawn(2), size=settings.samples)
    mean, cov = analytic_moments(spec, c)
    ks = ks_battery(
        fast,
        naive,
        alpha=settings.ks_alpha,
        coordinates=_coordinates(c.k, settings.ks_coordinates),
    )
    fast_moments = moment_match_report(fast, mean, cov)
    naive_moments = moment_match_report(naive, mean, cov)
    return ValidationCheck(
        name="hyperplane_equivalence",
        passed=ks.passed and fast_moments.passed and naive_moments.passed,
        detail={
            "ks_min_p_value": ks.min_p_value,
            "fast_cov_relative_error": fast_moments.cov_relative_error,
            "naive_cov_relative_error": naive_moments.cov_relative_error,
            "fast_max_mean_z": fast_moments.max_mean_z,
        },
    )


def check_hyperplane_constraint(
    settings: ValidationSettings, rng: RngState
) -> ValidationCheck:
    """Every draw of either sampler satisfies ``G x = r``."""

    spec, c = random_hyperplane_instance(
        settings.hyperplane_k, settings.hyperplane_k2, settings.cov, rng.spawn(0)
    )
    n = min(settings.samples, 10_000)
    fast = constraint_residual(c, sample_fast(spec, c, rng.spawn(1), size=n))
    naive = constraint_residual(c, sample_naive(spec, c, rng.spawn(2), size=n))
    return ValidationCheck(
        name="hyperplane_constraint",
        passed=max(fast, naive) <= CONSTRAINT_TOLERANCE,
        detail={"fast_residual": fast, "naive_residual": naive},
    )


def check_structured_cov(
    settings: ValidationSettings, rng: RngState
) -> ValidationCheck:
    """The matrix-free sampler matches ``S11 - S12 S22^{-1} S21`` and the baseline."""

    spec = random_structured_cov_spec(
        settings.structured_k1, settings.structured_k2, settings.cov, rng.spawn(0)
    )
    fast = sample_structured_cov(spec, rng.spawn(1), size=settings.samples)
    naive = sample_structured_cov_naive(spec, rng.spawn(2), size=settings.samples)
    moments = moment_match_report(fast, spec.mu1, spec.target_covariance())
    ks = ks_battery(
        fast,
        naive,
        alpha=settings.ks_alpha,
        coordinates=_coordinates(spec.k1, settings.ks_coordinates),
    )
    return ValidationCheck(
        name="structured_cov",
        passed=moments.passed and ks.passed,
        detail={
            "cov_relative_error": moments.cov_relative_error,
            "max_mean_z": moments.max_mean_z,
            "ks_min_p_value": ks.min_p_value,
        },
    )


def check_example3(settings: ValidationSettings, rng: RngState) -> ValidationCheck:
    """Both simplex-covariance forms agree draw for draw and match the dense law."""

    mu1, a, phi1 = example3_instance(settings.structured_k1 + 1, rng.spawn(0))
    second = sample_example3(mu1, a, phi1, rng.spawn(1), size=settings.samples)
    first = sample_example3_first_form(
        mu1, a, phi1, rng.spawn(1), size=settings.samples
    )
    gap = float(np.max(np.abs(first - second)))
    target = example3_naive_spec(mu1, a, phi1)
    moments = moment_match_report(second, target.mean, target.cov.to_dense())
    return ValidationCheck(
        name="example3",
        passed=moments.passed and gap <= EQUALITY_TOLERANCE,
        detail={
            "form_gap": gap,
            "cov_relative_error": moments.cov_relative_error,
            "max_mean_z": moments.max_mean_z,
        },
    )


def check_structured_prec(
    settings: ValidationSettings, rng: RngState
) -> ValidationCheck:
    """The Woodbury sampler matches ``(A + Phi^T Omega Phi)^{-1}``."""

    spec = random_structured_prec_spec(
        settings.prec_p, settings.prec_n, rng.spawn(0), kind=settings.cov
    )
    draws = sample_structured_prec(spec, rng.spawn(1), size=settings.samples)
    cov = CovarianceModel.dense(spec.posterior_precision()).inverse().to_dense()
    moments = moment_match_report(draws, spec.mu_beta, cov)
    return ValidationCheck(
        name="structured_prec",
        passed=moments.passed,
        detail={
            "cov_relative_error": moments.cov_relative_error,
            "max_mean_z": moments.max_mean_z,
        },
    )


def check_regression_posterior(
    settings: ValidationSettings, rng: RngState
) -> ValidationCheck:
    """Regression posterior draws centre on the dense posterior mean."""

    spec = random_structured_prec_spec(
        settings.prec_p, settings.prec_n, rng.spawn(0), kind=settings.cov
    )
    t = rng.spawn(1).standard_normal(spec.n)
    draws = sample_regression_posterior(spec, t, rng.spawn(2), size=settings.samples)
    cov = CovarianceModel.dense(spec.posterior_precision()).inverse().to_dense()
    moments = moment_match_report(draws, regression_posterior_mean(spec, t), cov)
    return ValidationCheck(
        name="regression_posterior",
        passed=moments.passed,
        detail={
            "cov_relative_error": moments.cov_relative_error,
            "max_mean_z": moments.max_mean_z,
        },
    )


def check_simplex_diag(settings: ValidationSettings, rng: RngState) -> ValidationCheck:
    """The O(k) simplex sampler reproduces the general projection on one stream."""

    mu1, a, phi1 = example3_instance(settings.hyperplane_k, rng.spawn(0))
    phi = np.append(phi1, 1.0 - phi1.sum())
    mu = np.append(mu1, 1.0 - mu1.sum())
    spec = GaussianSpec(mu, CovarianceModel.diagonal(a * phi))
    c = HyperplaneConstraint.build(np.ones((1, phi.shape[0])), [1.0])
    n = min(settings.samples, 10_000)
    general = sample_fast(spec, c, rng.spawn(1), size=n)
    special = sample_simplex_diag(mu, a, phi, rng.spawn(1), size=n)
    gap = float(np.max(np.abs(general - special)))
    return ValidationCheck(
        name="simplex_diag",
        passed=gap <= EQUALITY_TOLERANCE,
        detail={"max_abs_gap": gap},
    )


VALIDATION_CHECKS: Final[dict[str, Check]] = {
    "hyperplane_equivalence": check_hyperplane_equivalence,
    "hyperplane_constraint": check_hyperplane_constraint,
    "structured_cov": check_structured_cov,
    "example3": check_example3,
    "structured_prec": check_structured_prec,
    "regression_posterior": check_regression_posterior,
    "simplex_diag": check_simplex_diag,
}


def run_validation(
    settings: ValidationSettings, checks: Sequence[str] | None = None
) -> ValidationReport:
    """Run the selected checks (all by default) for every trial.

    Raises
    ------
    ConfigurationError
        If a requested check is not registered.
    """

    names = list(VALIDATION_CHECKS) if checks is None else list(checks)
    unknown = [name for name in names if name not in VALIDATION_CHECKS]
    if unknown:
        raise ConfigurationError(f"unknown validation checks: {', '.join(unknown)}")

    results: list[ValidationCheck] = []
    for index, name in enumerate(names):
        for trial in range(settings.trials):
            rng = instance_rng(settings.seed, "validate", (index,), trial)
            outcome = VALIDATION_CHECKS[name](settings, rng)
            check = outcome.model_copy(
                update={"detail": {**outcome.detail, "trial": trial}}
            )
            results.append(check)
            log.info(
                "validation.check_finished",
                check=name,
                trial=trial,
                passed=check.passed,
            )
    report = ValidationReport(checks=results)
    log.info(
        "validation.finished",
        checks=len(results),
        failures=len(report.failures),
    )
    return report


def require_passed(report: ValidationReport) -> None:
    """Raise :class:`ValidationFailedError` naming every failed check."""

    if not report.passed:
        failed = sorted(set(report.failures))
        raise ValidationFailedError(f"validation failed: {', '.join(failed)}")
