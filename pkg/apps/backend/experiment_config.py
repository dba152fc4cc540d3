# Experiment configuration loading and merging.
"""Resolve the settings of one ``mvn-bench`` invocation.

Settings are layered, later layers winning:

1. defaults for the subcommand from ``config/experiments.yml`` (the ``desk``
   section, or ``paper`` with ``--paper-scale``);
2. an optional ``--config`` file, JSON or YAML;
3. explicit command-line flags.

The merged mapping is validated into a :class:`ExperimentConfig`.
"""

from __future__ import annotations

from collections.abc import Mapping
from pathlib import Path
from typing import Any

import structlog
import yaml
from pydantic import ValidationError

from core.models.bench_models import ExperimentConfig
from core.models.exceptions import ConfigurationError, InvalidArgumentError

log = structlog.get_logger()

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[2] / "config" / "experiments.yml"


def _read_mapping(path: Path) -> dict[str, Any]:
    try:
        with path.open(encoding="utf-8") as handle:
            data = yaml.safe_load(handle)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"cannot parse {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path} must contain a mapping at top level")
    return data


def load_defaults(
    experiment: str, paper_scale: bool = False, path: Path = DEFAULT_CONFIG_PATH
) -> dict[str, Any]:
    """Defaults for ``experiment`` from the desk or paper section of the YAML file."""

    if not path.exists():
        raise ConfigurationError(f"experiment defaults not found at {path}")
    scale = "paper" if paper_scale else "desk"
    section = _read_mapping(path).get(scale, {})
    defaults = section.get(experiment)
    if defaults is None:
        raise ConfigurationError(f"no {scale} defaults for experiment '{experiment}'")
    log.debug("experiment_config.defaults_loaded", experiment=experiment, scale=scale)
    return dict(defaults)


def load_override_file(path: Path) -> dict[str, Any]:
    """Read a ``--config`` file; ``yaml.safe_load`` accepts JSON as well."""

    if not path.exists():
        raise ConfigurationError(f"config file not found: {path}")
    return _read_mapping(path)


def parse_grid(text: str) -> dict[str, list[float]]:
    """Parse ``"k=50,200;k2=20"`` into ``{"k": [50.0, 200.0], "k2": [20.0]}``.

    Raises
    ------
    InvalidArgumentError
        On a malformed axis, a non-numeric value or an axis without values.
    """

    grid: dict[str, list[float]] = {}
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        name, separator, values = chunk.partition("=")
        name = name.strip()
        if not separator or not name:
            raise InvalidArgumentError(
                f"grid axis '{chunk}' is not of the form name=v1,v2"
            )
        try:
            parsed = [float(value) for value in values.split(",") if value.strip()]
        except ValueError as exc:
            raise InvalidArgumentError(
                f"grid axis '{name}' has a non-numeric value"
            ) from exc
        if not parsed:
            raise InvalidArgumentError(f"grid axis '{name}' has no values")
        grid[name] = parsed
    return grid


def _merge(base: dict[str, Any], update: Mapping[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in update.items():
        if key == "settings" and isinstance(value, Mapping):
            merged["settings"] = {**merged.get("settings", {}), **value}
        else:
            merged[key] = value
    return merged


def resolve_config(
    experiment: str,
    *,
    paper_scale: bool = False,
    config_path: Path | None = None,
    overrides: Mapping[str, Any] | None = None,
    defaults_path: Path = DEFAULT_CONFIG_PATH,
) -> ExperimentConfig:
    """Merge defaults, the optional config file and flag overrides.

    ``overrides`` holds only flags the user actually passed. For the
    simplex-covariance sweep the ``example3_grid`` default replaces ``grid``
    unless a grid was given explicitly.
    """

    layered = load_defaults(experiment, paper_scale, defaults_path)
    if config_path is not None:
        layered = _merge(layered, load_override_file(config_path))
    layered = _merge(layered, overrides or {})

    example3_grid = layered.pop("example3_grid", None)
    explicit_grid = "grid" in (overrides or {}) or (
        config_path is not None and "grid" in load_override_file(config_path)
    )
    if layered.get("sweep") == "example3" and example3_grid and not explicit_grid:
        layered["grid"] = example3_grid

    try:
        config = ExperimentConfig(experiment=experiment, **layered)
    except ValidationError as exc:
        raise ConfigurationError(
            f"invalid configuration for {experiment}: {exc}"
        ) from exc
    log.info(
        "experiment_config.resolved",
        experiment=experiment,
        paper_scale=paper_scale,
        trials=config.trials,
        samples=config.samples,
        grid=config.grid,
    )
    return config
