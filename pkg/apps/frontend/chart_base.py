"""Base configuration and styling for the benchmark figures.

Holds the series palette, the shared layout and the empty-data placeholder.
"""

import plotly.graph_objects as go
from plotly.graph_objects import Figure, layout

SERIES_COLORS = {
    "algorithm1": "#BB0A0A",
    "algorithm1_per_draw": "#FFC107",
    "algorithm2": "#007E9E",
    "naive": "#BB0A0A",
    "fast": "#007E9E",
    "sgmcmc_fast": "#007E9E",
    "sgmcmc_gibbs1": "#28A745",
    "sgmcmc_gibbs5": "#17A2B8",
    "sgmcmc_gibbs10": "#142D54",
    "batch_posterior_mean": "#6C757D",
}
FALLBACK_COLOR = "#142D54"
TEXT_COLOR = "#142D54"
AXIS_COLOR = "#6C757D"

BASE_LAYOUT = go.Layout(
    font=layout.Font(family="Arial, sans-serif", size=12, color=TEXT_COLOR),
    plot_bgcolor="white",
    paper_bgcolor="white",
    margin=layout.Margin(l=70, r=20, t=60, b=60),
    showlegend=True,
    legend=layout.Legend(orientation="h", y=-0.2),
    width=900,
    height=520,
)

GRID_CONFIG: dict[str, bool | float | str] = {
    "showgrid": True,
    "gridcolor": "#E9ECEF",
    "gridwidth": 1,
    "zeroline": False,
}


def series_color(name: str) -> str:
    return SERIES_COLORS.get(name, FALLBACK_COLOR)


def create_base_figure() -> Figure:
    fig = go.Figure()
    fig.update_layout(BASE_LAYOUT)  # type: ignore[arg-type]
    return fig


def apply_axis_styling(fig: Figure, log_x: bool = False, log_y: bool = False) -> None:
    """Shared axis lines and grid; ``log_x``/``log_y`` switch to log scale."""

    common = {
        "linecolor": AXIS_COLOR,
        "linewidth": 1,
        "ticks": "outside",
        "tickcolor": AXIS_COLOR,
        **GRID_CONFIG,
    }
    fig.update_xaxes(type="log" if log_x else "linear", **common)
    fig.update_yaxes(type="log" if log_y else "linear", **common)


def empty_figure(title: str) -> Figure:
    """Placeholder figure for a CSV without data rows."""

    fig = create_base_figure()
    fig.add_annotation(
        text=f"No data rows for {title}",
        xref="paper",
        yref="paper",
        x=0.5,
        y=0.5,
        xanchor="center",
        yanchor="middle",
        showarrow=False,
        font={"size": 16, "color": "gray"},
    )
    fig.update_layout(
        title=f"{title} - No Data",
        xaxis={"visible": False},
        yaxis={"visible": False},
        showlegend=False,
    )
    return fig
