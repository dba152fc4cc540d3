# CSV persistence for benchmark and residual records.
"""Write and read the two result schemas.

Benchmark files carry :data:`BENCH_COLUMNS`; SG-MCMC files carry
:data:`RESIDUAL_COLUMNS`. The header decides which schema a file is parsed
with. Empty dimension cells mean "not used by this experiment".
"""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path
from typing import Any

import pandas as pd
import structlog
from pydantic import BaseModel, ValidationError

from core.models.bench_models import (
    BENCH_COLUMNS,
    RESIDUAL_COLUMNS,
    BenchRecord,
    ResidualRecord,
)
from core.models.exceptions import ParseError

log = structlog.get_logger()

ResultRecord = BenchRecord | ResidualRecord

_SCHEMAS: dict[tuple[str, ...], type[BenchRecord] | type[ResidualRecord]] = {
    BENCH_COLUMNS: BenchRecord,
    RESIDUAL_COLUMNS: ResidualRecord,
}


def records_frame(
    records: Sequence[BaseModel], columns: Sequence[str]
) -> pd.DataFrame:
    """Records as a frame with exactly ``columns``, in order.

    Cells keep their Python types, so optional integer columns are not
    widened to float.
    """

    rows = [record.model_dump() for record in records]
    return pd.DataFrame(rows, columns=list(columns), dtype=object)


def write_bench_csv(records: Sequence[BenchRecord], path: Path) -> Path:
    return _write(records, BENCH_COLUMNS, path)


def write_residual_csv(records: Sequence[ResidualRecord], path: Path) -> Path:
    return _write(records, RESIDUAL_COLUMNS, path)


def _write(records: Sequence[BaseModel], columns: Sequence[str], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    records_frame(records, columns).to_csv(path, index=False)
    log.info("csv_io.written", path=str(path), rows=len(records))
    return path


def _clean(row: dict[str, Any]) -> dict[str, Any]:
    return {key: (None if value == "" else value) for key, value in row.items()}


def read_records(path: Path) -> list[ResultRecord]:
    """Parse a benchmark or residual CSV back into validated records.

    Raises
    ------
    ParseError
        With the 1-based file line of the first bad row; line 1 for a
        missing or unknown header.
    """

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError as exc:
        raise ParseError(1, "file is empty") from exc
    except pd.errors.ParserError as exc:
        raise ParseError(1, f"malformed CSV: {exc}") from exc

    header = tuple(frame.columns)
    model = _SCHEMAS.get(header)
    if model is None:
        raise ParseError(1, f"unrecognised header {','.join(header)}")

    records: list[ResultRecord] = []
    for offset, row in enumerate(frame.to_dict(orient="records")):
        try:
            records.append(model.model_validate(_clean(row)))
        except ValidationError as exc:
            first = exc.errors()[0]
            field = ".".join(str(part) for part in first["loc"])
            raise ParseError(offset + 2, f"{field}: {first['msg']}") from exc
    log.info("csv_io.read", path=str(path), rows=len(records), schema=model.__name__)
    return records


def load_frame(path: Path) -> pd.DataFrame:
    """Validated records of ``path`` as a typed frame, for plotting."""

    records = read_records(path)
    if not records:
        header = _header_of(path)
        columns = BENCH_COLUMNS if header == BENCH_COLUMNS else RESIDUAL_COLUMNS
        return pd.DataFrame(columns=list(columns))
    frame = pd.DataFrame([record.model_dump() for record in records])
    return frame.convert_dtypes()


def _header_of(path: Path) -> tuple[str, ...]:
    return tuple(pd.read_csv(path, nrows=0).columns)
