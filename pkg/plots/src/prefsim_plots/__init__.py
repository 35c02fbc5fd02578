"""Batch figure generation from prefsim summary CSVs."""

from .render import (
    DEFAULT_FACET_KEYS,
    MissingColumnError,
    PlotSpec,
    RenderResult,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_FACET_KEYS",
    "MissingColumnError",
    "PlotSpec",
    "RenderResult",
    "render",
]
