"""Wall-clock scaling of the fast samplers against their dense baselines.

These sweeps use the shipped desk grids and the real clock, so they are all
marked slow.
"""

from __future__ import annotations

from collections.abc import Sequence

import pytest

from apps.backend.experiment_config import resolve_config
from core.models.bench_models import BenchRecord
from services.benchmark_service import (
    BenchmarkService,
    fit_loglog_slope,
    summarize_timings,
)

pytestmark = pytest.mark.slow


def _medians(records: Sequence[BenchRecord], axis: str) -> dict[str, dict[int, float]]:
    summary = summarize_timings(records)
    curves: dict[str, dict[int, float]] = {}
    for row in summary.itertuples(index=False):
        point = int(getattr(row, axis))
        curves.setdefault(str(row.algorithm), {})[point] = float(row.median_ms)
    return curves


def _slope(curve: dict[int, float]) -> float:
    points = sorted(curve)
    return fit_loglog_slope(points, [curve[point] for point in points])


def test_projection_beats_transform_at_every_dimension() -> None:
    config = resolve_config("bench-hyperplane")
    assert config.grid == {"k": [50.0, 200.0, 1000.0], "k2": [20.0]}

    curves = _medians(BenchmarkService().run_hyperplane(config), "k")

    for k in (50, 200, 1000):
        assert curves["algorithm2"][k] < curves["algorithm1"][k], k


def test_simplex_covariance_sweep_scales_linearly() -> None:
    config = resolve_config(
        "bench-structured-cov",
        overrides={"sweep": "example3", "repetitions": 1},
    )
    assert config.grid == {"k": [250.0, 500.0, 1000.0, 2000.0, 4000.0]}

    curves = _medians(BenchmarkService().run_structured_cov(config), "k")
    fast, naive = curves["fast"], curves["naive"]
    fast_slope, naive_slope = _slope(fast), _slope(naive)

    assert 0.8 <= fast_slope <= 1.5
    assert naive_slope >= fast_slope + 0.4
    for k in (500, 1000, 2000, 4000):
        assert fast[k] < naive[k], k


def test_structured_covariance_wins_at_every_rank() -> None:
    config = resolve_config("bench-structured-cov")
    assert config.grid == {"k1": [1000.0], "k2": [10.0, 50.0, 100.0, 250.0]}

    curves = _medians(BenchmarkService().run_structured_cov(config), "k2")

    for k2 in (10, 50, 100, 250):
        assert curves["fast"][k2] < curves["naive"][k2], k2


def test_structured_precision_crossover_and_slope() -> None:
    config = resolve_config("bench-structured-prec")
    assert config.grid == {"n": [500.0], "p": [50.0, 200.0, 1000.0, 2000.0, 4000.0]}

    curves = _medians(BenchmarkService().run_structured_prec(config), "p")
    fast, naive = curves["fast"], curves["naive"]

    for p in (2000, 4000):
        assert fast[p] < naive[p], p
    assert _slope(fast) <= 1.5
