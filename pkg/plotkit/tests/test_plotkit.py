import csv
import math

import matplotlib.colors as mcolors
import numpy as np
import pytest

from plotkit import (
    OBSERVABLES,
    VARIANCE_COLORS,
    FigureSpec,
    PlotError,
    SchemaError,
    build_figure,
    exp_power_pdf,
    lognormal_pdf,
    read_fits,
    read_histograms,
    render,
)
from plotkit import cli


@pytest.fixture(scope="session")
def ensemble_csvs(tmp_path_factory):
    """Real pipeline artifacts at desk scale (fast linear solver, small N)."""
    from darcysa import parse_config, runner

    out = tmp_path_factory.mktemp("ensemble")
    cfg = parse_config(
        "run.n = 30\nrun.solver = fvm\n",
        profile="desk",
        overrides={"run.out": str(out), "run.seed": 1},
    )
    runner.run(cfg)
    return out / "histograms.csv", out / "fits.csv"


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


@pytest.fixture
def synthetic_csvs(tmp_path):
    """Hand-built CSVs covering all six ladder variances for one observable."""
    sigma2s = (0.125, 0.25, 0.5, 1.0, 1.75, 2.5)
    hist_rows = []
    fit_rows = []
    for s in sigma2s:
        for left, right, dens in ((0.5, 1.0, 0.8), (1.0, 1.5, 0.9), (1.5, 2.0, 0.3)):
            hist_rows.append([s, "qy_star", left, right, dens])
        fit_rows.append([s, "qy_star", "lognormal", 0.1, 0.4, "", -10.0, 0.01, 0.05, 1])
    hist_path = tmp_path / "histograms.csv"
    fits_path = tmp_path / "fits.csv"
    write_csv(
        hist_path,
        ["sigma2", "observable", "bin_left", "bin_right", "density"],
        hist_rows,
    )
    write_csv(
        fits_path,
        ["sigma2", "observable", "family", "mu", "sigma", "k",
         "loglik", "ks_stat", "ks_crit", "ks_pass"],
        fit_rows,
    )
    return hist_path, fits_path


# -- densities ---------------------------------------------------------------

def test_lognormal_pdf_matches_closed_form():
    x = 1.7
    mu, sigma = 0.2, 0.6
    z = (math.log(x) - mu) / sigma
    want = math.exp(-0.5 * z * z) / (x * sigma * math.sqrt(2 * math.pi))
    assert lognormal_pdf(x, mu, sigma) == pytest.approx(want, rel=1e-12)
    assert lognormal_pdf(-1.0, mu, sigma) == 0.0
    assert lognormal_pdf(0.0, mu, sigma) == 0.0


def test_lognormal_pdf_integrates_to_one():
    x = np.linspace(1e-6, 60.0, 400_000)
    total = np.trapezoid(lognormal_pdf(x, 0.3, 0.5), x)
    assert total == pytest.approx(1.0, abs=1e-4)


def test_exp_power_gaussian_case():
    # k = 2 is a normal density with standard deviation sigma / sqrt(2)
    x = np.linspace(-3.0, 3.0, 7)
    mu, sigma = 0.4, 0.9
    std = sigma / math.sqrt(2.0)
    want = np.exp(-0.5 * ((x - mu) / std) ** 2) / (std * math.sqrt(2 * math.pi))
    assert np.allclose(exp_power_pdf(x, mu, sigma, 2.0), want, rtol=1e-12)


def test_exp_power_pdf_integrates_to_one():
    for k in (0.7, 1.0, 2.0, 4.0):
        x = np.linspace(-80.0, 80.0, 400_000)
        total = np.trapezoid(exp_power_pdf(x, 0.0, 1.3, k), x)
        assert total == pytest.approx(1.0, abs=1e-4)


# -- CSV reading -------------------------------------------------------------

def test_schema_error_names_missing_column(tmp_path):
    bad = tmp_path / "histograms.csv"
    bad.write_text("sigma2,observable,bin_left,bin_right\n0.5,qy_star,0,1\n")
    with pytest.raises(SchemaError, match="density"):
        read_histograms(bad)
    badf = tmp_path / "fits.csv"
    badf.write_text("sigma2,observable,mu,sigma,k\n")
    with pytest.raises(SchemaError, match="family"):
        read_fits(badf)


def test_read_roundtrip(synthetic_csvs):
    hist_path, fits_path = synthetic_csvs
    hists = read_histograms(hist_path)
    left, right, dens = hists[(0.5, "qy_star")]
    assert left.tolist() == [0.5, 1.0, 1.5]
    assert dens.tolist() == [0.8, 0.9, 0.3]
    fit = read_fits(fits_path)[(0.5, "qy_star")]
    assert fit.family == "lognormal"
    assert fit.k is None


# -- figure assembly ---------------------------------------------------------

def test_figure_spec_rejects_unknown_observable(tmp_path):
    with pytest.raises(PlotError, match="observable"):
        FigureSpec("vorticity", str(tmp_path / "f.png"))


def test_missing_sigma2_is_an_error(synthetic_csvs, tmp_path):
    hist_path, fits_path = synthetic_csvs
    spec = FigureSpec("qy_star", str(tmp_path / "f.png"), sigma2s=(0.3,))
    with pytest.raises(PlotError, match="0.3"):
        build_figure(read_histograms(hist_path), read_fits(fits_path), spec)


def test_legend_names_fit_family(synthetic_csvs, tmp_path):
    hist_path, fits_path = synthetic_csvs
    spec = FigureSpec("qy_star", str(tmp_path / "f.png"), sigma2s=(0.5,))
    fig = build_figure(read_histograms(hist_path), read_fits(fits_path), spec)
    labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
    assert any("lognormal" in lab for lab in labels)
    assert any("0.5" in lab for lab in labels)


def test_overlay_mode_within_axis_range(synthetic_csvs, tmp_path):
    hist_path, fits_path = synthetic_csvs
    spec = FigureSpec("qy_star", str(tmp_path / "f.png"), sigma2s=(0.5,))
    fig = build_figure(read_histograms(hist_path), read_fits(fits_path), spec)
    mode = math.exp(0.1 - 0.4**2)  # argmax of the fitted lognormal
    lo, hi = fig.axes[0].get_xlim()
    assert lo <= mode <= hi


def test_six_variance_panel_uses_ladder_colors(synthetic_csvs, tmp_path):
    hist_path, fits_path = synthetic_csvs
    spec = FigureSpec("qy_star", str(tmp_path / "f.png"))
    fig = build_figure(read_histograms(hist_path), read_fits(fits_path), spec)
    got = {mcolors.to_rgba(line.get_color()) for line in fig.axes[0].get_lines()}
    want = {mcolors.to_rgba(c) for c in VARIANCE_COLORS.values()}
    assert got == want


def test_overlay_curve_uses_fit_parameters_verbatim(synthetic_csvs, tmp_path):
    hist_path, fits_path = synthetic_csvs
    spec = FigureSpec("qy_star", str(tmp_path / "f.png"), sigma2s=(0.5,))
    fig = build_figure(read_histograms(hist_path), read_fits(fits_path), spec)
    curves = [l for l in fig.axes[0].get_lines() if l.get_linestyle() == "-"]
    assert len(curves) == 1
    x = curves[0].get_xdata()
    assert np.allclose(curves[0].get_ydata(), lognormal_pdf(x, 0.1, 0.4))


def test_render_is_deterministic_and_read_only(synthetic_csvs, tmp_path):
    hist_path, fits_path = synthetic_csvs
    before = hist_path.read_bytes(), fits_path.read_bytes()
    payloads = []
    for i in (1, 2):
        out = tmp_path / f"fig{i}.png"
        render(hist_path, fits_path, FigureSpec("qy_star", str(out)))
        payloads.append(out.read_bytes())
    assert payloads[0] == payloads[1]
    assert (hist_path.read_bytes(), fits_path.read_bytes()) == before


# -- CLI and end-to-end smoke -------------------------------------------------

def test_cli_renders_all_observables_from_pipeline_csvs(ensemble_csvs, tmp_path, capsys):
    hist_path, fits_path = ensemble_csvs
    for obs in OBSERVABLES:
        out = tmp_path / f"{obs}.png"
        code = cli.main([
            "--hist", str(hist_path), "--fits", str(fits_path),
            "--observable", obs, "--out", str(out),
        ])
        assert code == cli.EXIT_OK
        assert out.stat().st_size > 0
    assert "wrote" in capsys.readouterr().out


def test_cli_single_variance_pressure_smoke(ensemble_csvs, tmp_path):
    hist_path, fits_path = ensemble_csvs
    out = tmp_path / "p_center.png"
    code = cli.main([
        "--hist", str(hist_path), "--fits", str(fits_path),
        "--observable", "p_center", "--sigma2", "0.5", "--out", str(out),
    ])
    assert code == cli.EXIT_OK
    assert out.stat().st_size > 0


def test_cli_error_exit_on_missing_variance(ensemble_csvs, tmp_path, capsys):
    hist_path, fits_path = ensemble_csvs
    code = cli.main([
        "--hist", str(hist_path), "--fits", str(fits_path),
        "--observable", "qy_star", "--sigma2", "9.0",
        "--out", str(tmp_path / "f.png"),
    ])
    assert code == cli.EXIT_ERROR
    assert "9.0" in capsys.readouterr().err


def test_cli_io_exit_on_missing_input(tmp_path):
    code = cli.main([
        "--hist", str(tmp_path / "nope.csv"), "--fits", str(tmp_path / "nope2.csv"),
        "--observable", "qy_star", "--out", str(tmp_path / "f.png"),
    ])
    assert code == cli.EXIT_IO
