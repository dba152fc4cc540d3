"""Plotly figures for benchmark timings and SG-MCMC residual curves.

Timing figures put the swept dimension on the x axis and the median wall
time per grid point on the y axis, both logarithmic, one series per
algorithm (and per fixed dimension when a grid varies more than one axis).
Residual figures show the residual against minibatch index and against
cumulative wall time side by side.
"""

from __future__ import annotations

from pathlib import Path

import pandas as pd
import plotly.graph_objects as go
import structlog
from plotly.subplots import make_subplots

from apps.backend.csv_io import load_frame
from apps.frontend.chart_base import (
    BASE_LAYOUT,
    apply_axis_styling,
    create_base_figure,
    empty_figure,
    series_color,
)
from core.models.bench_models import RESIDUAL_COLUMNS
from core.models.covariance import FloatArray
from core.models.exceptions import InvalidArgumentError
from services.benchmark_service import fit_loglog_slope

log = structlog.get_logger()

SWEEP_AXIS = {
    "hyperplane": "k",
    "structured_cov": "k2",
    "example3": "k",
    "structured_prec": "p",
}
DIMENSIONS = ("k", "k1", "k2", "n", "p")
FLOOR_SERIES = "batch_posterior_mean"


def _series_label(algorithm: str, fixed: dict[str, int], cov_kind: str | None) -> str:
    extras = [f"{name}={value}" for name, value in fixed.items()]
    if cov_kind is not None:
        extras.append(cov_kind)
    if not extras:
        return algorithm
    return f"{algorithm} ({', '.join(extras)})"


def _slope_or_none(x: FloatArray, y: FloatArray) -> float | None:
    try:
        return fit_loglog_slope(x, y)
    except InvalidArgumentError:
        return None


def timing_figure(frame: pd.DataFrame) -> go.Figure:
    """Median wall time against the swept dimension on log-log axes.

    The legend entry of each series carries its fitted log-log slope over
    the top decade of the sweep when at least two points fall in it. Frames
    mixing dense and diagonal covariances get one series per kind.
    """

    if frame.empty:
        return empty_figure("benchmark")
    experiment = str(frame["experiment"].iloc[0])
    x_name = SWEEP_AXIS.get(experiment)
    if x_name is None:
        raise InvalidArgumentError(f"no timing layout for experiment '{experiment}'")

    fixed_names = [
        name
        for name in DIMENSIONS
        if name != x_name and frame[name].notna().any() and frame[name].nunique() > 1
    ]
    split_kind = frame["cov_kind"].nunique() > 1
    series_keys = ["algorithm", *fixed_names] + (["cov_kind"] if split_kind else [])
    medians = (
        frame.groupby([*series_keys, x_name])["wall_time_ms"].median().reset_index()
    )

    fig = create_base_figure()
    for group_key, group in medians.groupby(series_keys):
        values = group_key if isinstance(group_key, tuple) else (group_key,)
        algorithm = str(values[0])
        fixed = {
            name: int(value)
            for name, value in zip(fixed_names, values[1 : 1 + len(fixed_names)])
        }
        cov_kind = str(values[-1]) if split_kind else None
        group = group.sort_values(x_name)
        label = _series_label(algorithm, fixed, cov_kind)
        x = group[x_name].to_numpy(dtype=float)
        y = group["wall_time_ms"].to_numpy(dtype=float)
        slope = _slope_or_none(x, y)
        if slope is not None:
            label = f"{label}, slope {slope:.2f}"
        fig.add_trace(
            go.Scatter(
                x=x,
                y=y,
                mode="lines+markers",
                name=label,
                line={
                    "color": series_color(algorithm),
                    "width": 2,
                    "dash": "dash" if cov_kind == "dense" else "solid",
                },
                marker={"size": 7},
            )
        )
    fig.update_layout(
        title=f"{experiment}: median wall time",
        xaxis_title=x_name,
        yaxis_title="wall time (ms)",
    )
    apply_axis_styling(fig, log_x=True, log_y=True)
    return fig


def residual_figure(frame: pd.DataFrame) -> go.Figure:
    """Residual against minibatch index (left) and cumulative time (right).

    The batch posterior mean is drawn as a dashed horizontal floor.
    """

    if frame.empty:
        return empty_figure("sgmcmc")
    fig = make_subplots(
        rows=1,
        cols=2,
        subplot_titles=("residual vs minibatch", "residual vs time"),
    )
    fig.update_layout(BASE_LAYOUT)  # type: ignore[arg-type]
    floor = frame[frame["algorithm"] == FLOOR_SERIES]
    chains = frame[frame["algorithm"] != FLOOR_SERIES]
    for algorithm, group in chains.groupby("algorithm", sort=True):
        group = group.sort_values("minibatch")
        style = {"color": series_color(str(algorithm)), "width": 2}
        fig.add_trace(
            go.Scatter(
                x=group["minibatch"].to_numpy(dtype=float),
                y=group["residual"].to_numpy(dtype=float),
                mode="lines",
                name=str(algorithm),
                legendgroup=str(algorithm),
                line=style,
            ),
            row=1,
            col=1,
        )
        fig.add_trace(
            go.Scatter(
                x=group["cumulative_time_ms"].to_numpy(dtype=float),
                y=group["residual"].to_numpy(dtype=float),
                mode="lines",
                name=str(algorithm),
                legendgroup=str(algorithm),
                showlegend=False,
                line=style,
            ),
            row=1,
            col=2,
        )
    if not floor.empty:
        level = float(floor["residual"].iloc[0])
        for col in (1, 2):
            fig.add_hline(
                y=level,
                line_dash="dash",
                line_color=series_color(FLOOR_SERIES),
                row=1,
                col=col,
            )
        fig.add_trace(
            go.Scatter(
                x=[None],
                y=[None],
                mode="lines",
                name=FLOOR_SERIES,
                line={"color": series_color(FLOOR_SERIES), "dash": "dash"},
            )
        )
    apply_axis_styling(fig)
    fig.update_xaxes(title_text="minibatch", row=1, col=1)
    fig.update_xaxes(title_text="cumulative time (ms)", row=1, col=2)
    fig.update_yaxes(title_text="residual", row=1, col=1)
    return fig


def figure_for(frame: pd.DataFrame) -> go.Figure:
    if tuple(frame.columns) == RESIDUAL_COLUMNS:
        return residual_figure(frame)
    return timing_figure(frame)


def write_svg(fig: go.Figure, path: Path) -> Path:
    """Export ``fig`` as SVG; needs the ``kaleido`` engine."""

    path.parent.mkdir(parents=True, exist_ok=True)
    fig.write_image(str(path), format="svg")
    log.info("bench_charts.svg_written", path=str(path))
    return path


def plot_csv(csv_path: Path, out_dir: Path) -> Path:
    """Render ``csv_path`` to ``<out_dir>/<experiment>.svg`` and return the path."""

    frame = load_frame(csv_path)
    name = str(frame["experiment"].iloc[0]) if not frame.empty else csv_path.stem
    return write_svg(figure_for(frame), out_dir / f"{name}.svg")
