"""Integration tests for the timing sweeps."""

from __future__ import annotations

import itertools

import pytest

from core.models.bench_models import ExperimentConfig
from core.models.exceptions import InvalidArgumentError
from services.benchmark_service import (
    BenchmarkService,
    fit_loglog_slope,
    summarize_timings,
    time_draws,
)


@pytest.fixture
def service() -> BenchmarkService:
    """Service whose clock advances one millisecond per reading."""
    ticks = itertools.count()
    return BenchmarkService(clock=lambda: next(ticks) * 1e-3)


def _config(experiment: str, **changes) -> ExperimentConfig:
    fields = {"trials": 5, "samples": 20, "repetitions": 1, "cov": "diag"}
    return ExperimentConfig(experiment=experiment, **{**fields, **changes})


class TestHyperplaneSweep:
    def test_one_row_per_algorithm_point_and_trial(self, service) -> None:
        config = _config("bench-hyperplane", grid={"k": [10], "k2": [2, 3, 4]})
        records = service.run_hyperplane(config)

        assert len(records) == 2 * 3 * 5
        assert {record.algorithm for record in records} == {
            "algorithm1",
            "algorithm2",
        }
        assert all(record.wall_time_ms == pytest.approx(1.0) for record in records)
        assert all(record.cov_kind == "diagonal" for record in records)
        assert all(record.k1 is None and record.p is None for record in records)

    def test_seeds_are_reproducible_and_distinct(self, service) -> None:
        config = _config("bench-hyperplane", grid={"k": [8], "k2": [2]}, seed=3)
        first = [record.seed for record in service.run_hyperplane(config)]
        second = [record.seed for record in service.run_hyperplane(config)]

        assert first == second
        per_trial = first[::2]
        assert len(set(per_trial)) == 5

    def test_thread_pool_keeps_order(self, service) -> None:
        grid = {"k": [8, 12], "k2": [2]}
        serial = service.run_hyperplane(_config("bench-hyperplane", grid=grid))
        pooled = service.run_hyperplane(
            _config("bench-hyperplane", grid=grid, workers=3)
        )
        assert [r.seed for r in serial] == [r.seed for r in pooled]
        assert [r.k for r in serial] == [r.k for r in pooled]

    def test_k2_fraction_axis(self, service) -> None:
        config = _config(
            "bench-hyperplane", trials=1, grid={"k": [10, 20], "k2_frac": [0.2]}
        )
        points = {(r.k, r.k2) for r in service.run_hyperplane(config)}
        assert points == {(10, 2), (20, 4)}

    def test_per_draw_variant_and_dense_covariance(self, service) -> None:
        config = _config(
            "bench-hyperplane",
            trials=1,
            samples=3,
            cov="dense",
            grid={"k": [6], "k2": [2]},
            algorithms=["algorithm1_per_draw"],
        )
        (record,) = service.run_hyperplane(config)
        assert record.algorithm == "algorithm1_per_draw"
        assert record.cov_kind == "dense"

    @pytest.mark.parametrize(
        "changes",
        [
            {"grid": {"k": [5], "k2": [5, 8]}},
            {"grid": {"k2": [2]}},
            {"grid": {"k": [5.5], "k2": [2]}},
            {"grid": {"k": [10], "k2": [2]}, "algorithms": ["algorithm3"]},
        ],
    )
    def test_invalid_grids(self, service, changes) -> None:
        with pytest.raises(InvalidArgumentError):
            service.run_hyperplane(_config("bench-hyperplane", **changes))


class TestStructuredSweeps:
    def test_general_covariance_sweep(self, service) -> None:
        config = _config(
            "bench-structured-cov", trials=2, grid={"k1": [6], "k2": [2, 3]}
        )
        records = service.run_structured_cov(config)

        assert len(records) == 2 * 2 * 2
        assert {r.experiment for r in records} == {"structured_cov"}
        assert {r.algorithm for r in records} == {"fast", "naive"}
        assert all(r.k is None and r.k1 == 6 for r in records)

    def test_simplex_covariance_sweep(self, service) -> None:
        config = _config(
            "bench-structured-cov", trials=1, sweep="example3", grid={"k": [5, 8]}
        )
        records = service.run_structured_cov(config)

        assert {r.experiment for r in records} == {"example3"}
        assert sorted({r.k for r in records}) == [5, 8]

    def test_precision_sweep(self, service) -> None:
        config = _config(
            "bench-structured-prec", trials=1, grid={"n": [4], "p": [3, 6]}
        )
        records = service.run_structured_prec(config)

        assert len(records) == 4
        assert {(r.n, r.p) for r in records} == {(4, 3), (4, 6)}


def test_time_draws_takes_median(rng) -> None:
    readings = iter([0.0, 0.004, 1.0, 1.001, 2.0, 2.002])
    sizes: list[int] = []

    def draw(stream):
        return sizes.append

    elapsed = time_draws(draw, 5, 3, 3, rng, clock=lambda: next(readings))
    assert elapsed == pytest.approx(2.0)
    assert sizes == [5, 5, 5]


def test_summarize_timings(service) -> None:
    config = _config("bench-hyperplane", grid={"k": [10], "k2": [2, 3, 4]})
    summary = summarize_timings(service.run_hyperplane(config))

    assert len(summary) == 2 * 3
    assert set(summary["trials"]) == {5}
    assert summary["median_ms"].tolist() == pytest.approx([1.0] * 6)
    assert summarize_timings([]).empty


class TestLogLogSlope:
    def test_exact_power_law(self) -> None:
        x = [10.0, 100.0, 1000.0, 10000.0]
        y = [value**2 for value in x]
        assert fit_loglog_slope(x, y) == pytest.approx(2.0)
        assert fit_loglog_slope(x, y, top_decade=False) == pytest.approx(2.0)

    def test_top_decade_ignores_small_sizes(self) -> None:
        x = [1.0, 100.0, 500.0, 1000.0]
        y = [50.0, 100.0, 500.0, 1000.0]
        assert fit_loglog_slope(x, y) == pytest.approx(1.0)

    @pytest.mark.parametrize(
        ("x", "y"),
        [
            ([10.0], [1.0]),
            ([10.0, -1.0], [1.0, 2.0]),
            ([1.0, 1000.0], [1.0, 2.0]),
        ],
    )
    def test_rejects(self, x, y) -> None:
        with pytest.raises(InvalidArgumentError):
            fit_loglog_slope(x, y)
