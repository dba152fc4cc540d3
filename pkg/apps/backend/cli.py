"""Command-line entry point for the sampling benchmarks.

Usage examples:
  mvn-bench bench-hyperplane --grid "k=50,200,1000;k2=20" --trials 5
  mvn-bench bench-structured-cov --sweep example3 --out results/example3.csv
  mvn-bench bench-structured-prec --paper-scale
  mvn-bench validate --samples 100000
  mvn-bench sgmcmc --seed 7 --out results/sgmcmc.csv
  mvn-bench plot --csv results/hyperplane.csv --out figures
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

import structlog

from apps.backend.csv_io import write_bench_csv, write_residual_csv
from apps.backend.experiment_config import parse_grid, resolve_config
from config.logging_config import configure_logging
from core.models.bench_models import BenchRecord, ExperimentConfig
from core.models.exceptions import (
    ConfigurationError,
    InvalidArgumentError,
    ParseError,
    ValidationFailedError,
)
from services.benchmark_service import BenchmarkService
from services.sgmcmc_service import SgmcmcRunSettings, SgmcmcService
from services.validation_service import (
    ValidationSettings,
    require_passed,
    run_validation,
)

log = structlog.get_logger()

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

DEFAULT_RESULTS_DIR = Path("results")
DEFAULT_FIGURES_DIR = Path("figures")

BENCH_COMMANDS: dict[str, tuple[str, Callable[[BenchmarkService], Any]]] = {
    "bench-hyperplane": ("hyperplane", lambda service: service.run_hyperplane),
    "bench-structured-cov": (
        "structured_cov",
        lambda service: service.run_structured_cov,
    ),
    "bench-structured-prec": (
        "structured_prec",
        lambda service: service.run_structured_prec,
    ),
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="Base seed for instances and noise.")
    parser.add_argument("--trials", type=int, help="Random instances per grid point.")
    parser.add_argument("--samples", type=int, help="Draws per measurement.")
    parser.add_argument(
        "--grid",
        type=parse_grid,
        help='Grid axes, e.g. "k=50,200;k2=20".',
    )
    parser.add_argument("--cov", choices=["dense", "diag"], help="Covariance kind.")
    parser.add_argument("--out", type=Path, help="Output path.")
    parser.add_argument(
        "--paper-scale",
        action="store_true",
        help="Use the full-size experiment defaults.",
    )
    parser.add_argument(
        "--config",
        type=Path,
        help="JSON or YAML file overriding the defaults; flags still win.",
    )
    parser.add_argument("--repetitions", type=int, help="Timing repetitions.")
    parser.add_argument("--workers", type=int, help="Threads running trials.")
    parser.add_argument(
        "--verbose", action="store_true", help="Log at debug level."
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvn-bench",
        description=(
            "Benchmark and validate samplers for hyperplane-truncated and "
            "structured multivariate normals."
        ),
    )
    commands = parser.add_subparsers(dest="command", required=True)

    for name in BENCH_COMMANDS:
        sub = commands.add_parser(name, help=f"Timing sweep ({name}).")
        _add_common(sub)
        if name == "bench-structured-cov":
            sub.add_argument(
                "--sweep",
                choices=["general", "example3"],
                help="General (k1, k2) sweep or the simplex-covariance k sweep.",
            )

    _add_common(
        commands.add_parser("validate", help="Run the statistical check battery.")
    )
    _add_common(commands.add_parser("sgmcmc", help="SG-MCMC residual curves."))

    plot = commands.add_parser("plot", help="Render a result CSV to SVG.")
    plot.add_argument("--csv", type=Path, required=True, help="Result CSV.")
    plot.add_argument(
        "--out",
        type=Path,
        default=DEFAULT_FIGURES_DIR,
        help="Directory receiving <experiment>.svg.",
    )
    plot.add_argument("--verbose", action="store_true", help="Log at debug level.")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    names = ("seed", "trials", "samples", "grid", "cov", "repetitions", "workers")
    overrides = {
        name: getattr(args, name) for name in names if getattr(args, name) is not None
    }
    if getattr(args, "sweep", None) is not None:
        overrides["sweep"] = args.sweep
    return overrides


def _resolve(experiment: str, args: argparse.Namespace) -> ExperimentConfig:
    return resolve_config(
        experiment,
        paper_scale=args.paper_scale,
        config_path=args.config,
        overrides=_overrides(args),
    )


def _bench(args: argparse.Namespace) -> int:
    experiment, runner = BENCH_COMMANDS[args.command]
    config = _resolve(args.command, args)
    if experiment == "structured_cov" and config.sweep == "example3":
        experiment = "example3"
    records: list[BenchRecord] = runner(BenchmarkService())(config)
    out = args.out or DEFAULT_RESULTS_DIR / f"{experiment}.csv"
    print(write_bench_csv(records, out))
    return EXIT_OK


def _validate(args: argparse.Namespace) -> int:
    config = _resolve("validate", args)
    report = run_validation(ValidationSettings.from_experiment(config))
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.name} trial={check.detail.get('trial')}")
    require_passed(report)
    return EXIT_OK


def _sgmcmc(args: argparse.Namespace) -> int:
    config = _resolve("sgmcmc", args)
    records = SgmcmcService().run(SgmcmcRunSettings.from_experiment(config))
    out = args.out or DEFAULT_RESULTS_DIR / "sgmcmc.csv"
    print(write_residual_csv(records, out))
    return EXIT_OK


def _plot(args: argparse.Namespace) -> int:
    from apps.frontend.bench_charts import plot_csv

    print(plot_csv(args.csv, args.out))
    return EXIT_OK


HANDLERS: dict[str, Callable[[argparse.Namespace], int]] = {
    **{name: _bench for name in BENCH_COMMANDS},
    "validate": _validate,
    "sgmcmc": _sgmcmc,
    "plot": _plot,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the subcommand and map failures to exit codes.

    Returns 0 on success, 1 when validation fails, 2 for usage or
    configuration errors and 3 for filesystem errors.
    """

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InvalidArgumentError as exc:
        print(f"mvn-bench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    configure_logging("debug" if args.verbose else "info")
    log.info("cli.started", command=args.command)

    try:
        return HANDLERS[args.command](args)
    except ValidationFailedError as exc:
        log.error("cli.validation_failed", error=str(exc))
        return EXIT_VALIDATION_FAILED
    except (InvalidArgumentError, ConfigurationError, ParseError) as exc:
        log.error("cli.usage_error", command=args.command, error=str(exc))
        print(f"mvn-bench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        log.error("cli.io_error", command=args.command, error=str(exc))
        print(f"mvn-bench: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
