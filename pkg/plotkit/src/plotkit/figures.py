"""Figure assembly from the ensemble CSV artifacts.

Inputs are the histograms.csv / fits.csv pair written by the ensemble
pipeline; this module only reads them. Each figure shows the empirical
density of one observable at one or more field variances, optionally with
the fitted density overlaid, one color per variance.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .densities import exp_power_pdf, lognormal_pdf


class PlotError(ValueError):
    pass


class SchemaError(PlotError):
    """An input CSV is missing a required column."""


OBSERVABLES = ("p_center", "p_08Y", "qx_star", "qy_star", "Qy_star")

# one color per field variance on the standard ladder
VARIANCE_COLORS = {
    0.125: "gray",
    0.25: "red",
    0.5: "blue",
    1.0: "magenta",
    1.75: "brown",
    2.5: "orange",
}

_FALLBACK_COLORS = ("green", "purple", "olive", "teal", "navy", "black")

_AXIS_LABELS = {
    "p_center": "$p$ at the domain center",
    "p_08Y": "$p$ at 0.8 of the flow depth",
    "qx_star": "$q_x^*$",
    "qy_star": "$q_y^*$",
    "Qy_star": "$Q_y^*$",
}

HIST_COLUMNS = ("sigma2", "observable", "bin_left", "bin_right", "density")
FIT_COLUMNS = ("sigma2", "observable", "family", "mu", "sigma", "k")


@dataclass(frozen=True)
class FitRow:
    family: str  # 'lognormal' | 'exponential-power'
    mu: float
    sigma: float
    k: float | None

    def pdf(self, x):
        if self.family == "lognormal":
            return lognormal_pdf(x, self.mu, self.sigma)
        if self.family == "exponential-power":
            return exp_power_pdf(x, self.mu, self.sigma, self.k)
        raise PlotError(f"unknown fit family {self.family!r}")

    def label(self) -> str:
        if self.family == "lognormal":
            return f"lognormal($\\mu$={self.mu:.3g}, $\\sigma$={self.sigma:.3g})"
        return (
            f"exp-power($\\mu$={self.mu:.3g}, $\\sigma$={self.sigma:.3g}, "
            f"$k$={self.k:.3g})"
        )


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: one observable, a variance subset (None = all present),
    a color per variance, and the output target."""

    observable: str
    out_path: str
    sigma2s: tuple[float, ...] | None = None
    colors: dict[float, str] = field(default_factory=lambda: dict(VARIANCE_COLORS))
    overlay: bool = True
    fmt: str | None = None  # default: inferred from out_path extension

    def __post_init__(self):
        if self.observable not in OBSERVABLES:
            raise PlotError(
                f"unknown observable {self.observable!r}; choose from {OBSERVABLES}"
            )


def _check_columns(fieldnames, required, path):
    have = set(fieldnames or ())
    for col in required:
        if col not in have:
            raise SchemaError(f"{path}: missing column {col!r}")


def read_histograms(path):
    """histograms.csv -> {(sigma2, observable): (bin_left, bin_right, density)}."""
    bins: dict[tuple[float, str], list[tuple[float, float, float]]] = {}
    with open(path, newline="") as fh:
        r = csv.DictReader(fh)
        _check_columns(r.fieldnames, HIST_COLUMNS, path)
        for row in r:
            key = (float(row["sigma2"]), row["observable"])
            bins.setdefault(key, []).append(
                (float(row["bin_left"]), float(row["bin_right"]), float(row["density"]))
            )
    return {
        key: tuple(np.array(col) for col in zip(*rows)) for key, rows in bins.items()
    }


def read_fits(path):
    """fits.csv -> {(sigma2, observable): FitRow}."""
    fits: dict[tuple[float, str], FitRow] = {}
    with open(path, newline="") as fh:
        r = csv.DictReader(fh)
        _check_columns(r.fieldnames, FIT_COLUMNS, path)
        for row in r:
            k = row["k"]
            fits[(float(row["sigma2"]), row["observable"])] = FitRow(
                family=row["family"],
                mu=float(row["mu"]),
                sigma=float(row["sigma"]),
                k=None if k in ("", None) else float(k),
            )
    return fits


def _color_for(sigma2, spec: FigureSpec, rank: int) -> str:
    if sigma2 in spec.colors:
        return spec.colors[sigma2]
    return _FALLBACK_COLORS[rank % len(_FALLBACK_COLORS)]


def build_figure(hists, fits, spec: FigureSpec):
    """Assemble the matplotlib figure; callers own closing it."""
    available = sorted({s for s, obs in hists if obs == spec.observable})
    if not available:
        raise PlotError(f"no histogram rows for observable {spec.observable!r}")
    wanted = available if spec.sigma2s is None else list(spec.sigma2s)
    missing = [s for s in wanted if (s, spec.observable) not in hists]
    if missing:
        raise PlotError(
            f"sigma2 {missing} not in histograms for {spec.observable!r}; "
            f"available: {available}"
        )

    fig, ax = plt.subplots(figsize=(5.0, 3.6), dpi=150)
    for rank, sigma2 in enumerate(wanted):
        color = _color_for(sigma2, spec, rank)
        left, right, density = hists[(sigma2, spec.observable)]
        centers = 0.5 * (left + right)
        ax.plot(
            centers, density, "o", ms=3.5, color=color,
            label=f"$\\sigma^2$ = {sigma2:g}",
        )
        fit = fits.get((sigma2, spec.observable))
        if spec.overlay and fit is not None:
            x = np.linspace(float(left[0]), float(right[-1]), 400)
            ax.plot(x, fit.pdf(x), "-", lw=1.2, color=color, label=fit.label())
    ax.set_xlabel(_AXIS_LABELS[spec.observable])
    ax.set_ylabel("probability density")
    ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    return fig


def render(hist_path, fits_path, spec: FigureSpec) -> str:
    """Draw the figure and write it to spec.out_path; returns the path.

    Output bytes are reproducible for identical inputs: embedded
    creation dates are disabled for the formats that carry them.
    """
    hists = read_histograms(hist_path)
    fits = read_fits(fits_path)
    fig = build_figure(hists, fits, spec)
    fmt = spec.fmt or str(spec.out_path).rsplit(".", 1)[-1].lower()
    metadata = None
    if fmt == "pdf":
        metadata = {"CreationDate": None}
    elif fmt == "svg":
        metadata = {"Date": None}
    try:
        fig.savefig(spec.out_path, format=fmt, metadata=metadata)
    finally:
        plt.close(fig)
    return str(spec.out_path)
