"""Presentation layer for the icatcma benchmark harness's CSV artifacts."""

from .render import (
    PlotSpec,
    aggregate_runs,
    render_convergence,
    render_table,
    render_tfreeze_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "PlotSpec",
    "aggregate_runs",
    "render_convergence",
    "render_table",
    "render_tfreeze_sweep",
]
