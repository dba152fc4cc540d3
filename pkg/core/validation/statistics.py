# Statistical diagnostics for sampler verification.
"""Empirical moments, Kolmogorov-Smirnov tests, constraint residuals and
moment matching against analytic oracles.

Every function is a deterministic function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Final

import numpy as np
import structlog
from numpy.typing import ArrayLike
from scipy.stats import ks_2samp

from core.models.bench_models import KSBatteryResult, KSResult, MomentMatchReport
from core.models.covariance import FloatArray, as_dense, as_vector
from core.models.exceptions import DimensionMismatchError, InvalidArgumentError
from core.models.gaussian_models import HyperplaneConstraint

log = structlog.get_logger()

MEAN_TOLERANCE_SE: Final[float] = 4.0
COV_RELATIVE_TOLERANCE: Final[float] = 0.05
KS_ALPHA: Final[float] = 0.01


@dataclass(frozen=True, eq=False)
class MomentSummary:
    """Sample size, sample mean and unbiased sample covariance."""

    n: int
    mean: FloatArray
    cov: FloatArray


def _as_samples(samples: ArrayLike) -> FloatArray:
    array = np.asarray(samples, dtype=np.float64)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != 2:
        raise InvalidArgumentError(f"samples must be n x k, got shape {array.shape}")
    return array


def summarize(samples: ArrayLike) -> MomentSummary:
    """Mean and unbiased covariance of the rows of ``samples``.

    Examples
    --------
    >>> summary = summarize([[0.0, 0.0], [2.0, 2.0]])
    >>> summary.mean
    array([1., 1.])
    >>> summary.cov
    array([[2., 2.],
           [2., 2.]])
    """

    draws = _as_samples(samples)
    n = draws.shape[0]
    if n < 2:
        raise InvalidArgumentError(f"need at least two samples, got {n}")
    mean = draws.mean(axis=0)
    centred = draws - mean
    cov = centred.T @ centred / (n - 1)
    return MomentSummary(n=n, mean=mean, cov=0.5 * (cov + cov.T))


def ks_two_sample(a: ArrayLike, b: ArrayLike) -> KSResult:
    """Two-sample KS statistic with its asymptotic p-value."""

    left = np.asarray(a, dtype=np.float64).ravel()
    right = np.asarray(b, dtype=np.float64).ravel()
    if left.size == 0 or right.size == 0:
        raise InvalidArgumentError("KS test needs two nonempty samples")
    result = ks_2samp(left, right, method="asymp")
    return KSResult(
        statistic=float(result.statistic),
        p_value=float(np.clip(result.pvalue, 0.0, 1.0)),
    )


def ks_battery(
    a: ArrayLike,
    b: ArrayLike,
    alpha: float = KS_ALPHA,
    coordinates: ArrayLike | None = None,
) -> KSBatteryResult:
    """Per-coordinate KS tests; passes when no p-value falls below ``alpha / m``.

    ``coordinates`` restricts the battery to a subset of columns; ``m`` is the
    number of columns tested.
    """

    left, right = _as_samples(a), _as_samples(b)
    if left.shape[1] != right.shape[1]:
        raise DimensionMismatchError(
            f"samples have {left.shape[1]} and {right.shape[1]} columns"
        )
    columns = (
        np.arange(left.shape[1])
        if coordinates is None
        else np.asarray(coordinates, dtype=np.int64)
    )
    results = [ks_two_sample(left[:, j], right[:, j]) for j in columns]
    corrected = alpha / max(len(results), 1)
    passed = all(result.p_value >= corrected for result in results)
    return KSBatteryResult(
        passed=passed, alpha=alpha, corrected_alpha=corrected, results=results
    )


def constraint_residual(c: HyperplaneConstraint, x: ArrayLike) -> float:
    """``||G x - r||_inf / max(1, ||r||_inf)``; for a batch, the worst row."""

    values = np.asarray(x, dtype=np.float64)
    if values.shape[-1] != c.k:
        raise DimensionMismatchError(
            f"x has {values.shape[-1]} coordinates, constraint acts on {c.k}"
        )
    residual = np.abs(values @ c.g.T - c.r)
    return float(residual.max()) / max(1.0, float(np.abs(c.r).max()))


def moment_match_report(
    samples: ArrayLike,
    analytic_mean: ArrayLike,
    analytic_cov: ArrayLike,
    mean_tolerance_se: float = MEAN_TOLERANCE_SE,
    cov_tolerance: float = COV_RELATIVE_TOLERANCE,
) -> MomentMatchReport:
    """Compare empirical moments with analytic ones.

    Coordinate ``i`` passes when ``|mean error| <= 4 sqrt(var_i / n)`` (with a
    ``1e-9`` absolute allowance for degenerate coordinates); the covariance
    passes when its relative Frobenius error is at most ``0.05``.
    """

    summary = summarize(samples)
    mean = as_vector(analytic_mean, "analytic_mean")
    cov = as_dense(analytic_cov, "analytic_cov")
    k = summary.mean.shape[0]
    if mean.shape[0] != k or cov.shape != (k, k):
        raise DimensionMismatchError(
            f"analytic moments {mean.shape}, {cov.shape} do not match k={k}"
        )

    variances = np.clip(np.diag(cov), 0.0, None)
    standard_error = np.sqrt(variances / summary.n)
    error = np.abs(summary.mean - mean)
    failures = np.flatnonzero(error > mean_tolerance_se * standard_error + 1e-9)
    with np.errstate(divide="ignore", invalid="ignore"):
        z_scores = np.where(standard_error > 0, error / standard_error, 0.0)

    reference = float(np.linalg.norm(cov))
    difference = float(np.linalg.norm(summary.cov - cov))
    relative = difference / reference if reference > 0 else difference
    passed = failures.size == 0 and relative <= cov_tolerance
    if not passed:
        log.info(
            "validation.moment_mismatch",
            mean_failures=int(failures.size),
            cov_relative_error=relative,
        )
    return MomentMatchReport(
        passed=passed,
        n=summary.n,
        max_mean_z=float(z_scores.max()) if z_scores.size else 0.0,
        mean_failures=[int(index) for index in failures],
        cov_relative_error=relative,
        cov_tolerance=cov_tolerance,
    )
