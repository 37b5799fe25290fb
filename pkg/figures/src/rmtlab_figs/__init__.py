"""Overlay figures for rmtlab experiment artifacts."""

__version__ = "0.1.0"

from .figs import (  # noqa: E402
    FigureSpec,
    SchemaError,
    plot_convergence,
    plot_radial_density,
)

__all__ = [
    "FigureSpec",
    "SchemaError",
    "plot_convergence",
    "plot_radial_density",
    "__version__",
]
