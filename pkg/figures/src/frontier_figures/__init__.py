"""Rendering of Monte Carlo summary CSVs into RMSE-versus-n panel plots."""

from .panels import (FigureSpec, RenderReport, SchemaError, render,
                     render_rmse_panels)

__version__ = "0.1.0"

__all__ = [
    "FigureSpec",
    "RenderReport",
    "SchemaError",
    "render",
    "render_rmse_panels",
]
