from .densities import exp_power_pdf, lognormal_pdf
from .figures import (
    OBSERVABLES,
    VARIANCE_COLORS,
    FigureSpec,
    FitRow,
    PlotError,
    SchemaError,
    build_figure,
    read_fits,
    read_histograms,
    render,
)

__all__ = [
    "OBSERVABLES", "VARIANCE_COLORS", "FigureSpec", "FitRow", "PlotError",
    "SchemaError", "build_figure", "exp_power_pdf", "lognormal_pdf",
    "read_fits", "read_histograms", "render",
]
