"""Tests for result CSV persistence."""

from __future__ import annotations

from pathlib import Path

import pytest

from apps.backend.csv_io import (
    load_frame,
    read_records,
    write_bench_csv,
    write_residual_csv,
)
from core.models.bench_models import (
    BENCH_COLUMNS,
    RESIDUAL_COLUMNS,
    BenchRecord,
    ResidualRecord,
)
from core.models.exceptions import ParseError


@pytest.fixture
def bench_records() -> list[BenchRecord]:
    return [
        BenchRecord(
            experiment="hyperplane",
            algorithm=algorithm,
            k=100,
            k2=20,
            trial=trial,
            seed=2**62 + trial,
            n_samples=1000,
            wall_time_ms=1.25 * (trial + 1),
            cov_kind="diagonal",
        )
        for algorithm in ("algorithm1", "algorithm2")
        for trial in range(2)
    ]


@pytest.fixture
def residual_records() -> list[ResidualRecord]:
    return [
        ResidualRecord(
            algorithm="sgmcmc_fast",
            minibatch=index,
            cumulative_time_ms=0.5 * index,
            residual=1.0 / index,
        )
        for index in range(1, 4)
    ]


def test_bench_file_layout(tmp_path: Path, bench_records) -> None:
    path = write_bench_csv(bench_records, tmp_path / "nested" / "hyperplane.csv")
    lines = path.read_text(encoding="utf-8").splitlines()

    assert lines[0] == ",".join(BENCH_COLUMNS)
    assert len(lines) == 5
    # unused dimensions are empty cells and integers stay integers
    assert lines[1].startswith("hyperplane,algorithm1,100,,20,,,0,")


def test_bench_records_read_back(tmp_path: Path, bench_records) -> None:
    path = write_bench_csv(bench_records, tmp_path / "hyperplane.csv")
    assert read_records(path) == bench_records


def test_residual_records_read_back(tmp_path: Path, residual_records) -> None:
    path = write_residual_csv(residual_records, tmp_path / "sgmcmc.csv")
    assert path.read_text(encoding="utf-8").splitlines()[0] == ",".join(
        RESIDUAL_COLUMNS
    )
    assert read_records(path) == residual_records


def test_header_only_file(tmp_path: Path) -> None:
    path = write_residual_csv([], tmp_path / "empty.csv")
    assert read_records(path) == []
    frame = load_frame(path)
    assert frame.empty
    assert tuple(frame.columns) == RESIDUAL_COLUMNS


def test_bad_row_reports_its_line(tmp_path: Path, bench_records) -> None:
    path = write_bench_csv(bench_records, tmp_path / "hyperplane.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    lines[3] = lines[3].replace(",diagonal", ",sparse")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    with pytest.raises(ParseError) as excinfo:
        read_records(path)
    assert excinfo.value.line == 4
    assert "cov_kind" in str(excinfo.value)


def test_non_numeric_cell(tmp_path: Path, residual_records) -> None:
    path = write_residual_csv(residual_records, tmp_path / "sgmcmc.csv")
    text = path.read_text(encoding="utf-8").replace(",0.5,", ",soon,")
    path.write_text(text, encoding="utf-8")

    with pytest.raises(ParseError) as excinfo:
        read_records(path)
    assert excinfo.value.line == 2


@pytest.mark.parametrize(
    "content",
    ["", "algorithm,k,wall_time_ms\nfast,3,1.0\n"],
)
def test_unusable_files_fail_on_line_one(tmp_path: Path, content: str) -> None:
    path = tmp_path / "odd.csv"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ParseError) as excinfo:
        read_records(path)
    assert excinfo.value.line == 1


def test_load_frame_types(tmp_path: Path, bench_records) -> None:
    frame = load_frame(write_bench_csv(bench_records, tmp_path / "h.csv"))

    assert len(frame) == 4
    assert frame["k"].tolist() == [100] * 4
    assert frame["k1"].isna().all()
    assert frame["wall_time_ms"].sum() == pytest.approx(2 * (1.25 + 2.5))
