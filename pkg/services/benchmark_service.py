# Benchmark Service - timing sweeps over sampler pairs.
"""Timing sweeps comparing fast samplers against their baselines.

For every grid point and trial the service builds a seeded random instance,
times each algorithm drawing ``samples`` variates and emits one
:class:`BenchRecord` per (algorithm, grid point, trial). Each measurement is
the median wall time of ``repetitions`` runs on a monotonic clock. Trials may
run on a thread pool; repetitions of one measurement always run on the same
thread.

Experiments
-----------
``hyperplane``
    ``algorithm1`` (null-space transform, cache built once per measurement),
    ``algorithm2`` (projection), and optionally ``algorithm1_per_draw``, the
    transform rebuilding its cache for every draw.
``structured_cov``
    Structured-covariance sampler against the dense-factor baseline.
``example3``
    The simplex covariance ``a diag(phi1) - a phi1 phi1^T`` at growing ``k``.
``structured_prec``
    Woodbury precision sampler against the dense-factor baseline.
"""

from __future__ import annotations

import itertools
import time
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Any

import numpy as np
import pandas as pd
import structlog
from numpy.typing import ArrayLike
from pydantic import BaseModel

from core.models.bench_models import BenchRecord, ExperimentConfig
from core.models.exceptions import InvalidArgumentError
from core.models.gaussian_models import StructuredCovSpec, StructuredPrecSpec
from core.samplers.hyperplane import (
    HyperplaneProjector,
    make_transform_cache,
    sample_fast,
    sample_naive,
)
from core.samplers.mvn import sample_mvn
from core.samplers.rng import RngState
from core.samplers.structured import (
    example3_naive_spec,
    naive_cov_factor,
    naive_prec_factor,
    sample_example3,
    sample_structured_cov,
    sample_structured_cov_naive,
    sample_structured_prec,
    sample_structured_prec_naive,
)
from services.instances import (
    example3_instance,
    instance_rng,
    instance_seed,
    random_hyperplane_instance,
    random_structured_cov_spec,
    random_structured_prec_spec,
)

log = structlog.get_logger()

CHUNK_ELEMENTS = 2**22
HYPERPLANE_ALGORITHMS = ("algorithm1", "algorithm2", "algorithm1_per_draw")


def _chunks(total: int, dim: int) -> Iterable[int]:
    step = max(1, CHUNK_ELEMENTS // max(dim, 1))
    remaining = total
    while remaining > 0:
        size = min(step, remaining)
        yield size
        remaining -= size


def time_draws(
    draw: Callable[[RngState], Callable[[int], Any]],
    n_samples: int,
    dim: int,
    repetitions: int,
    rng: RngState,
    clock: Callable[[], float] = time.perf_counter,
) -> float:
    """Median wall time in ms of ``repetitions`` runs producing ``n_samples`` draws.

    ``draw(rng)`` performs per-run setup (factorizations, caches) and returns
    a function drawing a batch of a given size; both parts are timed. Batches
    are capped so a chunk holds at most ``CHUNK_ELEMENTS`` floats.
    """

    timings = []
    for repetition in range(repetitions):
        stream = rng.spawn(repetition)
        start = clock()
        sampler = draw(stream)
        for size in _chunks(n_samples, dim):
            sampler(size)
        timings.append((clock() - start) * 1e3)
    return max(float(np.median(timings)), 1e-6)


def fit_loglog_slope(x: ArrayLike, y: ArrayLike, top_decade: bool = True) -> float:
    """Least-squares slope of ``log y`` against ``log x``.

    With ``top_decade`` only points with ``x >= max(x) / 10`` are used.
    """

    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    if xs.shape != ys.shape or xs.size < 2:
        raise InvalidArgumentError("slope fit needs two or more paired points")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise InvalidArgumentError("log-log fit needs positive values")
    if top_decade:
        keep = xs >= xs.max() / 10.0
        xs, ys = xs[keep], ys[keep]
        if xs.size < 2:
            raise InvalidArgumentError("fewer than two points in the top decade")
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


def summarize_timings(records: Sequence[BenchRecord]) -> pd.DataFrame:
    """Median ``wall_time_ms`` per experiment, algorithm, cov kind and grid point."""

    frame = pd.DataFrame([record.model_dump() for record in records])
    if frame.empty:
        return frame
    keys = ["experiment", "algorithm", "cov_kind", "k", "k1", "k2", "n", "p"]
    summary = (
        frame.groupby(keys, dropna=False)["wall_time_ms"]
        .agg(["median", "count"])
        .reset_index()
        .rename(columns={"median": "median_ms", "count": "trials"})
    )
    return summary


def _axis(config: ExperimentConfig, name: str) -> list[float]:
    values = config.grid.get(name)
    if not values:
        raise InvalidArgumentError(
            f"grid axis '{name}' is required for {config.experiment}"
        )
    return values


def _as_count(value: float, name: str) -> int:
    if value < 1 or value != int(value):
        raise InvalidArgumentError(
            f"grid value {name}={value} must be a positive integer"
        )
    return int(value)


class BenchmarkService(BaseModel):
    """Runs timing sweeps for the bench subcommands.

    Attributes
    ----------
    clock:
        Monotonic clock in seconds; injectable for tests.
    """

    clock: Callable[[], float] = time.perf_counter

    class Config:
        """Pydantic configuration."""

        arbitrary_types_allowed = True

    def _measure(
        self,
        config: ExperimentConfig,
        experiment: str,
        algorithm: str,
        point: dict[str, int],
        trial: int,
        seed: int,
        dim: int,
        cov_kind: str,
        draw: Callable[[RngState], Callable[[int], Any]],
    ) -> BenchRecord:
        sampling_rng = RngState.from_seed(seed).spawn(1)
        wall_time = time_draws(
            draw, config.samples, dim, config.repetitions, sampling_rng, self.clock
        )
        log.debug(
            "benchmark.measurement",
            experiment=experiment,
            algorithm=algorithm,
            trial=trial,
            wall_time_ms=wall_time,
            **point,
        )
        return BenchRecord(
            experiment=experiment,
            algorithm=algorithm,
            trial=trial,
            seed=seed,
            n_samples=config.samples,
            wall_time_ms=wall_time,
            cov_kind=cov_kind,
            **point,
        )

    def _run_trials(
        self,
        config: ExperimentConfig,
        points: list[dict[str, int]],
        run_trial: Callable[[dict[str, int], int], list[BenchRecord]],
    ) -> list[BenchRecord]:
        jobs = list(itertools.product(points, range(config.trials)))
        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                batches = list(pool.map(lambda job: run_trial(*job), jobs))
        else:
            batches = [run_trial(point, trial) for point, trial in jobs]
        records = [record for batch in batches for record in batch]
        log.info(
            "benchmark.sweep_finished",
            experiment=config.experiment,
            points=len(points),
            trials=config.trials,
            records=len(records),
        )
        return records

    def run_hyperplane(self, config: ExperimentConfig) -> list[BenchRecord]:
        """Sweep ``k`` and ``k2`` (or ``k2_frac``) for the hyperplane samplers."""

        algorithms = config.algorithms or ["algorithm1", "algorithm2"]
        unknown = sorted(set(algorithms) - set(HYPERPLANE_ALGORITHMS))
        if unknown:
            raise InvalidArgumentError(f"unknown hyperplane algorithms: {unknown}")
        ks = [_as_count(value, "k") for value in _axis(config, "k")]
        points = []
        for k in ks:
            if "k2_frac" in config.grid:
                k2s = [max(1, round(frac * k)) for frac in config.grid["k2_frac"]]
            else:
                k2s = [_as_count(value, "k2") for value in _axis(config, "k2")]
            points.extend({"k": k, "k2": k2} for k2 in k2s if k2 < k)
        if not points:
            raise InvalidArgumentError("hyperplane grid has no point with k2 < k")
        cov_kind = "diagonal" if config.cov == "diag" else "dense"

        def run_trial(point: dict[str, int], trial: int) -> list[BenchRecord]:
            key = tuple(point.values())
            seed = instance_seed(config.seed, "hyperplane", key, trial)
            rng = instance_rng(config.seed, "hyperplane", key, trial)
            spec, constraint = random_hyperplane_instance(
                point["k"], point["k2"], config.cov, rng
            )

            def algorithm1(stream: RngState) -> Callable[[int], Any]:
                cache = make_transform_cache(spec, constraint)
                return lambda size: sample_naive(spec, constraint, stream, cache, size)

            def algorithm2(stream: RngState) -> Callable[[int], Any]:
                projector = HyperplaneProjector(spec.cov, constraint.g)
                return lambda size: sample_fast(
                    spec, constraint, stream, size, projector=projector
                )

            def algorithm1_per_draw(stream: RngState) -> Callable[[int], Any]:
                def draw(size: int) -> None:
                    for _ in range(size):
                        sample_naive(spec, constraint, stream)

                return draw

            drawers = {
                "algorithm1": algorithm1,
                "algorithm2": algorithm2,
                "algorithm1_per_draw": algorithm1_per_draw,
            }
            return [
                self._measure(
                    config,
                    "hyperplane",
                    name,
                    point,
                    trial,
                    seed,
                    point["k"],
                    cov_kind,
                    drawers[name],
                )
                for name in algorithms
            ]

        return self._run_trials(config, points, run_trial)

    def run_structured_cov(self, config: ExperimentConfig) -> list[BenchRecord]:
        """General ``(k1, k2)`` sweep, or the simplex-covariance ``k`` sweep.

        The simplex sweep runs when ``config.sweep == "example3"``.
        """

        if config.sweep == "example3":
            return self._run_example3(config)
        points = [
            {"k1": _as_count(k1, "k1"), "k2": _as_count(k2, "k2")}
            for k1, k2 in itertools.product(_axis(config, "k1"), _axis(config, "k2"))
        ]
        cov_kind = "diagonal" if config.cov == "diag" else "dense"

        def run_trial(point: dict[str, int], trial: int) -> list[BenchRecord]:
            key = tuple(point.values())
            seed = instance_seed(config.seed, "structured_cov", key, trial)
            rng = instance_rng(config.seed, "structured_cov", key, trial)
            spec = random_structured_cov_spec(
                point["k1"], point["k2"], config.cov, rng
            )

            def fast(stream: RngState) -> Callable[[int], Any]:
                fresh = StructuredCovSpec(spec.mu1, spec.s11, spec.s12, spec.s22)
                return lambda size: sample_structured_cov(fresh, stream, size)

            def naive(stream: RngState) -> Callable[[int], Any]:
                factor = naive_cov_factor(spec)
                return lambda size: sample_structured_cov_naive(
                    spec, stream, size, factor=factor
                )

            return [
                self._measure(
                    config,
                    "structured_cov",
                    name,
                    point,
                    trial,
                    seed,
                    point["k1"],
                    cov_kind,
                    drawer,
                )
                for name, drawer in (("fast", fast), ("naive", naive))
            ]

        return self._run_trials(config, points, run_trial)

    def _run_example3(self, config: ExperimentConfig) -> list[BenchRecord]:
        points = [{"k": _as_count(k, "k")} for k in _axis(config, "k")]

        def run_trial(point: dict[str, int], trial: int) -> list[BenchRecord]:
            key = tuple(point.values())
            seed = instance_seed(config.seed, "example3", key, trial)
            rng = instance_rng(config.seed, "example3", key, trial)
            mu1, a, phi1 = example3_instance(point["k"], rng)

            def fast(stream: RngState) -> Callable[[int], Any]:
                return lambda size: sample_example3(mu1, a, phi1, stream, size)

            def naive(stream: RngState) -> Callable[[int], Any]:
                target = example3_naive_spec(mu1, a, phi1)
                return lambda size: sample_mvn(target, stream, size)

            return [
                self._measure(
                    config,
                    "example3",
                    name,
                    point,
                    trial,
                    seed,
                    point["k"],
                    "diagonal",
                    drawer,
                )
                for name, drawer in (("fast", fast), ("naive", naive))
            ]

        return self._run_trials(config, points, run_trial)

    def run_structured_prec(self, config: ExperimentConfig) -> list[BenchRecord]:
        """Sweep ``(n, p)`` for the Woodbury sampler, diagonal ``A`` and ``Omega``."""

        points = [
            {"n": _as_count(n, "n"), "p": _as_count(p, "p")}
            for n, p in itertools.product(_axis(config, "n"), _axis(config, "p"))
        ]

        def run_trial(point: dict[str, int], trial: int) -> list[BenchRecord]:
            key = tuple(point.values())
            seed = instance_seed(config.seed, "structured_prec", key, trial)
            rng = instance_rng(config.seed, "structured_prec", key, trial)
            spec = random_structured_prec_spec(point["p"], point["n"], rng)

            def fast(stream: RngState) -> Callable[[int], Any]:
                fresh = StructuredPrecSpec(
                    spec.mu_beta, spec.a, spec.phi, spec.omega
                )
                return lambda size: sample_structured_prec(fresh, stream, size)

            def naive(stream: RngState) -> Callable[[int], Any]:
                factor = naive_prec_factor(spec)
                return lambda size: sample_structured_prec_naive(
                    spec, stream, size, factor=factor
                )

            return [
                self._measure(
                    config,
                    "structured_prec",
                    name,
                    point,
                    trial,
                    seed,
                    point["p"],
                    "diagonal",
                    drawer,
                )
                for name, drawer in (("fast", fast), ("naive", naive))
            ]

        return self._run_trials(config, points, run_trial)
