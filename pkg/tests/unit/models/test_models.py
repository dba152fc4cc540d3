# Tests for value types and pydantic contracts.
"""Construction-time validation of covariance, Gaussian and benchmark models."""

from __future__ import annotations

import numpy as np
import pytest
from pydantic import ValidationError

from core.models.bench_models import (
    BenchRecord,
    ExperimentConfig,
    KSBatteryResult,
    KSResult,
    ResidualRecord,
    ValidationCheck,
    ValidationReport,
)
from core.models.covariance import CovarianceModel, as_vector
from core.models.exceptions import (
    DimensionMismatchError,
    InvalidArgumentError,
    NotPositiveDefiniteError,
    ParseError,
    RankDeficientError,
)
from core.models.gaussian_models import (
    BlockGaussianSpec,
    GaussianSpec,
    HyperplaneConstraint,
    StructuredPrecSpec,
)


class TestCovarianceModel:
    def test_small_asymmetry_is_symmetrized(self) -> None:
        model = CovarianceModel.dense([[1.0, 0.5], [0.5 + 1e-14, 1.0]])
        dense = model.to_dense()
        assert dense[0, 1] == dense[1, 0]

    def test_nonsquare_rejected(self) -> None:
        with pytest.raises(DimensionMismatchError):
            CovarianceModel.dense(np.ones((2, 3)))

    def test_diagonal_values_without_densifying(self) -> None:
        model = CovarianceModel.diagonal([1.0, 2.0])
        assert np.array_equal(model.diagonal_values, [1.0, 2.0])
        assert model.is_diagonal

    def test_inverse_and_scaling(self, make_spd) -> None:
        matrix = make_spd(3)
        model = CovarianceModel.dense(matrix)
        assert np.allclose(model.inverse().to_dense() @ matrix, np.eye(3))
        assert np.allclose(model.scaled(2.0).to_dense(), 2.0 * matrix)
        with pytest.raises(InvalidArgumentError):
            model.scaled(0.0)

    def test_indefinite_dense_rejected_at_construction(self) -> None:
        with pytest.raises(NotPositiveDefiniteError) as excinfo:
            CovarianceModel.dense([[2.0, 3.0], [3.0, 2.0]])
        assert excinfo.value.pivot == 1

    def test_dense_factor_computed_at_construction(self, make_spd) -> None:
        model = CovarianceModel.dense(make_spd(3))
        assert "factor" in vars(model)

    def test_non_finite_vector(self) -> None:
        with pytest.raises(InvalidArgumentError):
            as_vector([1.0, np.nan])


class TestGaussianModels:
    def test_mean_length_checked(self) -> None:
        with pytest.raises(DimensionMismatchError):
            GaussianSpec(np.zeros(3), CovarianceModel.diagonal([1.0, 1.0]))

    def test_constraint_rank_checked(self) -> None:
        with pytest.raises(RankDeficientError):
            HyperplaneConstraint.build([[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]], [1.0, 2.0])

    def test_constraint_needs_fewer_rows_than_columns(self) -> None:
        with pytest.raises(InvalidArgumentError):
            HyperplaneConstraint.build(np.eye(2), [1.0, 1.0])

    def test_constraint_r_length(self) -> None:
        with pytest.raises(DimensionMismatchError):
            HyperplaneConstraint.build([[1.0, 1.0]], [1.0, 2.0])

    def test_block_joint_must_be_positive_definite(self) -> None:
        with pytest.raises(NotPositiveDefiniteError):
            BlockGaussianSpec(
                mu1=[0.0], mu2=[0.0], s11=[[1.0]], s12=[[2.0]], s22=[[1.0]]
            )

    def test_prec_spec_inner_system(self) -> None:
        spec = StructuredPrecSpec(
            mu_beta=np.zeros(2),
            a=CovarianceModel.diagonal([1.0, 2.0]),
            phi=np.array([[1.0, 1.0]]),
            omega=CovarianceModel.diagonal([4.0]),
        )
        # 1/4 + 1/1 + 1/2
        assert spec.inner.to_dense()[0, 0] == pytest.approx(1.75)
        assert np.allclose(spec.posterior_precision(), [[5.0, 4.0], [4.0, 6.0]])


class TestBenchModels:
    def test_bench_record(self) -> None:
        record = BenchRecord(
            experiment="hyperplane",
            algorithm="algorithm2",
            k=50,
            k2=20,
            trial=0,
            seed=1,
            n_samples=100,
            wall_time_ms=5.0,
            cov_kind="diagonal",
        )
        assert record.per_sample_ms == pytest.approx(0.05)
        assert record.k1 is None

    @pytest.mark.parametrize(
        "changes",
        [{"wall_time_ms": 0.0}, {"cov_kind": "diag"}, {"trial": -1}, {"k": 0}],
    )
    def test_bench_record_rejects(self, changes) -> None:
        fields = {
            "experiment": "hyperplane",
            "algorithm": "algorithm1",
            "k": 5,
            "trial": 0,
            "seed": 0,
            "n_samples": 1,
            "wall_time_ms": 1.0,
            "cov_kind": "dense",
        }
        with pytest.raises(ValidationError):
            BenchRecord(**{**fields, **changes})

    def test_residual_record_defaults(self) -> None:
        record = ResidualRecord(
            algorithm="sgmcmc_fast", minibatch=3, cumulative_time_ms=1.5, residual=0.2
        )
        assert record.experiment == "sgmcmc"

    def test_experiment_config_rejects_empty_axis(self) -> None:
        with pytest.raises(ValidationError):
            ExperimentConfig(experiment="bench-hyperplane", grid={"k": []})
        with pytest.raises(ValidationError):
            ExperimentConfig(experiment="bench-hyperplane", trials=0)

    def test_reports(self) -> None:
        battery = KSBatteryResult(
            passed=True,
            alpha=0.01,
            corrected_alpha=0.005,
            results=[
                KSResult(statistic=0.1, p_value=0.2),
                KSResult(statistic=0.0, p_value=1.0),
            ],
        )
        assert battery.min_p_value == 0.2
        report = ValidationReport(
            checks=[
                ValidationCheck(name="a", passed=True),
                ValidationCheck(name="b", passed=False),
            ]
        )
        assert not report.passed
        assert report.failures == ["b"]


def test_parse_error_names_line() -> None:
    error = ParseError(7, "bad value")
    assert error.line == 7
    assert str(error) == "line 7: bad value"
