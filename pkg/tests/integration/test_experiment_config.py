"""Tests for layered experiment configuration."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
import yaml

from apps.backend.experiment_config import (
    DEFAULT_CONFIG_PATH,
    load_defaults,
    parse_grid,
    resolve_config,
)
from core.models.exceptions import ConfigurationError, InvalidArgumentError


@pytest.fixture
def defaults_file(tmp_path: Path) -> Path:
    data = {
        "desk": {
            "bench-hyperplane": {
                "trials": 2,
                "samples": 50,
                "grid": {"k": [10, 20], "k2": [3]},
            },
            "bench-structured-cov": {
                "trials": 1,
                "sweep": "general",
                "grid": {"k1": [8], "k2": [2]},
                "example3_grid": {"k": [4, 6]},
            },
            "sgmcmc": {"settings": {"v": 10, "eta": 0.1}},
        },
        "paper": {"bench-hyperplane": {"trials": 100, "grid": {"k": [500]}}},
    }
    path = tmp_path / "experiments.yml"
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return path


class TestParseGrid:
    def test_two_axes(self) -> None:
        assert parse_grid("k=50,200; k2=20") == {"k": [50.0, 200.0], "k2": [20.0]}

    def test_trailing_separators(self) -> None:
        assert parse_grid("k=5,;") == {"k": [5.0]}

    @pytest.mark.parametrize("text", ["k", "=5", "k=a,b", "k="])
    def test_malformed(self, text: str) -> None:
        with pytest.raises(InvalidArgumentError):
            parse_grid(text)


class TestResolveConfig:
    def test_desk_defaults(self, defaults_file) -> None:
        config = resolve_config("bench-hyperplane", defaults_path=defaults_file)
        assert config.trials == 2
        assert config.samples == 50
        assert config.grid == {"k": [10.0, 20.0], "k2": [3.0]}

    def test_paper_scale(self, defaults_file) -> None:
        config = resolve_config(
            "bench-hyperplane", paper_scale=True, defaults_path=defaults_file
        )
        assert config.trials == 100
        assert config.grid == {"k": [500.0]}

    def test_file_then_flags(self, defaults_file, tmp_path) -> None:
        override = tmp_path / "override.json"
        override.write_text(json.dumps({"trials": 7, "samples": 9}), encoding="utf-8")

        config = resolve_config(
            "bench-hyperplane",
            config_path=override,
            overrides={"trials": 3},
            defaults_path=defaults_file,
        )
        assert config.trials == 3
        assert config.samples == 9

    def test_settings_are_merged_key_by_key(self, defaults_file, tmp_path) -> None:
        override = tmp_path / "override.yml"
        override.write_text("settings:\n  v: 40\n", encoding="utf-8")

        config = resolve_config(
            "sgmcmc", config_path=override, defaults_path=defaults_file
        )
        assert config.settings == {"v": 40, "eta": 0.1}

    def test_simplex_sweep_swaps_grid(self, defaults_file) -> None:
        config = resolve_config(
            "bench-structured-cov",
            overrides={"sweep": "example3"},
            defaults_path=defaults_file,
        )
        assert config.grid == {"k": [4.0, 6.0]}

    def test_explicit_grid_wins_over_simplex_grid(self, defaults_file) -> None:
        config = resolve_config(
            "bench-structured-cov",
            overrides={"sweep": "example3", "grid": {"k": [12.0]}},
            defaults_path=defaults_file,
        )
        assert config.grid == {"k": [12.0]}

    def test_unknown_experiment(self, defaults_file) -> None:
        with pytest.raises(ConfigurationError, match="no desk defaults"):
            resolve_config("bench-nothing", defaults_path=defaults_file)

    def test_invalid_value(self, defaults_file) -> None:
        with pytest.raises(ConfigurationError):
            resolve_config(
                "bench-hyperplane",
                overrides={"trials": 0},
                defaults_path=defaults_file,
            )

    def test_missing_override_file(self, defaults_file, tmp_path) -> None:
        with pytest.raises(ConfigurationError, match="not found"):
            resolve_config(
                "bench-hyperplane",
                config_path=tmp_path / "absent.yml",
                defaults_path=defaults_file,
            )

    def test_unparseable_override_file(self, defaults_file, tmp_path) -> None:
        broken = tmp_path / "broken.yml"
        broken.write_text("trials: [1, 2\n", encoding="utf-8")
        with pytest.raises(ConfigurationError, match="cannot parse"):
            resolve_config(
                "bench-hyperplane", config_path=broken, defaults_path=defaults_file
            )

    def test_non_mapping_override_file(self, defaults_file, tmp_path) -> None:
        listing = tmp_path / "list.yml"
        listing.write_text("- 1\n- 2\n", encoding="utf-8")
        with pytest.raises(ConfigurationError, match="mapping"):
            resolve_config(
                "bench-hyperplane", config_path=listing, defaults_path=defaults_file
            )


@pytest.mark.parametrize(
    "experiment",
    [
        "bench-hyperplane",
        "bench-structured-cov",
        "bench-structured-prec",
        "validate",
        "sgmcmc",
    ],
)
@pytest.mark.parametrize("paper_scale", [False, True])
def test_shipped_defaults_resolve(experiment: str, paper_scale: bool) -> None:
    assert load_defaults(experiment, paper_scale, DEFAULT_CONFIG_PATH)
    config = resolve_config(experiment, paper_scale=paper_scale)
    assert config.experiment == experiment
