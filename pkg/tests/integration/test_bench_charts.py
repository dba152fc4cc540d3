"""Tests for the timing and residual figures."""

from __future__ import annotations

from pathlib import Path

import plotly.graph_objects as go
import pytest

from apps.backend.csv_io import load_frame, write_bench_csv, write_residual_csv
from apps.frontend.bench_charts import (
    figure_for,
    plot_csv,
    residual_figure,
    timing_figure,
)
from core.models.bench_models import BenchRecord, ResidualRecord
from core.models.exceptions import InvalidArgumentError


def _bench(
    experiment: str,
    algorithm: str,
    time_ms: float,
    cov_kind: str = "diagonal",
    **dims,
) -> BenchRecord:
    return BenchRecord(
        experiment=experiment,
        algorithm=algorithm,
        trial=0,
        seed=1,
        n_samples=10,
        wall_time_ms=time_ms,
        cov_kind=cov_kind,
        **dims,
    )


@pytest.fixture
def hyperplane_csv(tmp_path: Path) -> Path:
    records = []
    for k in (10, 100, 1000):
        records.append(_bench("hyperplane", "algorithm1", k**2 / 1000, k=k, k2=5))
        records.append(_bench("hyperplane", "algorithm2", k / 10, k=k, k2=5))
    return write_bench_csv(records, tmp_path / "hyperplane.csv")


@pytest.fixture
def residual_csv(tmp_path: Path) -> Path:
    records = [
        ResidualRecord(
            algorithm="batch_posterior_mean",
            minibatch=index,
            cumulative_time_ms=0.0,
            residual=0.01,
        )
        for index in (1, 3)
    ]
    for algorithm, step_ms in (("sgmcmc_fast", 0.1), ("sgmcmc_gibbs10", 2.0)):
        records.extend(
            ResidualRecord(
                algorithm=algorithm,
                minibatch=index,
                cumulative_time_ms=step_ms * index,
                residual=0.5 / index,
            )
            for index in (1, 2, 3)
        )
    return write_residual_csv(records, tmp_path / "sgmcmc.csv")


class TestTimingFigure:
    def test_series_carry_slopes_on_log_axes(self, hyperplane_csv) -> None:
        fig = timing_figure(load_frame(hyperplane_csv))

        assert [trace.name for trace in fig.data] == [
            "algorithm1, slope 2.00",
            "algorithm2, slope 1.00",
        ]
        assert list(fig.data[0].x) == [10.0, 100.0, 1000.0]
        assert fig.layout.xaxis.type == "log"
        assert fig.layout.yaxis.type == "log"

    def test_second_varying_dimension_splits_series(self, tmp_path) -> None:
        records = [
            _bench("structured_cov", algorithm, float(k1 + k2), k1=k1, k2=k2)
            for algorithm in ("fast", "naive")
            for k1 in (50, 80)
            for k2 in (1, 10, 100)
        ]
        frame = load_frame(write_bench_csv(records, tmp_path / "cov.csv"))
        names = [trace.name for trace in timing_figure(frame).data]

        assert len(names) == 4
        assert names[0].startswith("fast (k1=50)")

    def test_covariance_kinds_get_separate_series(self, tmp_path) -> None:
        records = [
            _bench("hyperplane", "algorithm2", scale * k, kind, k=k, k2=5)
            for kind, scale in (("diagonal", 0.1), ("dense", 10.0))
            for k in (10, 100)
        ]
        frame = load_frame(write_bench_csv(records, tmp_path / "mixed.csv"))
        fig = timing_figure(frame)

        assert [trace.name for trace in fig.data] == [
            "algorithm2 (dense), slope 1.00",
            "algorithm2 (diagonal), slope 1.00",
        ]
        assert list(fig.data[0].y) == pytest.approx([100.0, 1000.0])
        assert fig.data[0].line.dash == "dash"

    def test_single_covariance_kind_keeps_plain_labels(self, hyperplane_csv) -> None:
        names = [trace.name for trace in timing_figure(load_frame(hyperplane_csv)).data]
        assert not any("diagonal" in name for name in names)

    def test_unknown_experiment(self, tmp_path) -> None:
        records = [_bench("mystery", "fast", 1.0, k=3)]
        path = write_bench_csv(records, tmp_path / "m.csv")
        with pytest.raises(InvalidArgumentError):
            timing_figure(load_frame(path))


class TestResidualFigure:
    def test_two_panels_with_floor(self, residual_csv) -> None:
        fig = residual_figure(load_frame(residual_csv))

        chains = [trace for trace in fig.data if trace.name != "batch_posterior_mean"]
        assert len(chains) == 4
        assert {trace.xaxis for trace in chains} == {"x", "x2"}
        assert len(fig.layout.shapes) == 2
        assert fig.layout.shapes[0].y0 == pytest.approx(0.01)
        assert fig.layout.xaxis2.title.text == "cumulative time (ms)"

    def test_figure_for_dispatches(self, residual_csv, hyperplane_csv) -> None:
        assert len(figure_for(load_frame(residual_csv)).layout.shapes) == 2
        assert figure_for(load_frame(hyperplane_csv)).layout.xaxis.type == "log"


def test_empty_csv_gives_placeholder(tmp_path) -> None:
    frame = load_frame(write_residual_csv([], tmp_path / "sgmcmc.csv"))
    fig = figure_for(frame)
    assert fig.layout.annotations[0].text == "No data rows for sgmcmc"


def test_plot_csv_names_svg_after_experiment(hyperplane_csv, tmp_path, mocker) -> None:
    write_image = mocker.patch.object(go.Figure, "write_image")

    out = plot_csv(hyperplane_csv, tmp_path / "figures")

    assert out == tmp_path / "figures" / "hyperplane.svg"
    write_image.assert_called_once_with(str(out), format="svg")
