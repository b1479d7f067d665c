"""Per-realization observables, ensemble accumulation, parametric fits and KS tests."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy import stats as sps

from .darcy import PressureState, ScalarField, cell_velocities, face_flux, transmissibilities
from .grid import BoundaryConditions, GridSpec, locate


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class NormalizationSpec:
    """k_e = E[K] = exp(sigma2/2) for mean-zero lognormal K; i0 = dp/ly; area = lx*lz."""

    k_e: float
    i0: float
    area: float

    @classmethod
    def for_run(cls, sigma2: float, g: GridSpec, bc: BoundaryConditions) -> "NormalizationSpec":
        return cls(k_e=math.exp(0.5 * sigma2), i0=bc.dp / g.ly, area=g.lx * g.lz)


@dataclass(frozen=True)
class ObservableSample:
    realization_id: int
    sigma2: float
    p_center: float  # head at (0.5X, 0.5Y, 0.5Z)
    p_08y: float  # head at (0.5X, 0.8Y, 0.5Z)
    qx_star: float  # normalized transverse flow at center
    qy_star: float  # normalized main-direction flow at center
    qy_total_star: float  # normalized cross-section total flow, mean over layers
    conservation_dev: float  # std_j(Q_y(j)) / mean_j(Q_y(j))


OBSERVABLES = ("p_center", "p_08Y", "qx_star", "qy_star", "Qy_star")

_FIELDS = {
    "p_center": "p_center",
    "p_08Y": "p_08y",
    "qx_star": "qx_star",
    "qy_star": "qy_star",
    "Qy_star": "qy_total_star",
}


def extract(
    p: PressureState,
    K: ScalarField,
    norm: NormalizationSpec,
    sigma2: float,
    realization_id: int = 0,
    rule: str = "harmonic",
) -> ObservableSample:
    """Point and cross-section observables of one solved realization.

    Point values are nearest-cell-center samples; velocities normalize by
    k_e*i0 and the total flow additionally by the cross-section area.
    """
    g = p.grid
    T = transmissibilities(K, g, rule)
    fluxes = face_flux(p, T)
    qx, qy, _ = cell_velocities(fluxes)
    center = locate((0.5, 0.5, 0.5), g)
    c08 = locate((0.5, 0.8, 0.5), g)
    scale = norm.k_e * norm.i0
    qy_layers = fluxes.fy.sum(axis=(0, 2))  # Q_y(j) over the ny+1 face planes
    qy_mean = float(qy_layers.mean())
    dev = float(qy_layers.std() / qy_mean) if qy_mean != 0.0 else float(qy_layers.std())
    return ObservableSample(
        realization_id=realization_id,
        sigma2=sigma2,
        p_center=float(p.values[center]),
        p_08y=float(p.values[c08]),
        qx_star=float(qx[center] / scale),
        qy_star=float(qy[center] / scale),
        qy_total_star=qy_mean / (scale * norm.area),
        conservation_dev=dev,
    )


@dataclass
class EnsembleTable:
    """Raw observable values for one (sigma2, grid) parameter set.

    Merging is associative and commutative up to float roundoff, so samples
    may arrive from concurrent workers in any order.
    """

    sigma2: float
    grid_shape: tuple[int, int, int]
    samples: list[ObservableSample] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.samples)

    def add(self, s: ObservableSample):
        if s.sigma2 != self.sigma2:
            raise StatsError(f"sample sigma2={s.sigma2} does not match table sigma2={self.sigma2}")
        self.samples.append(s)

    def merge(self, other: "EnsembleTable"):
        if other.sigma2 != self.sigma2 or other.grid_shape != self.grid_shape:
            raise StatsError("cannot merge ensembles with different parameters")
        self.samples.extend(other.samples)

    def values(self, observable: str) -> np.ndarray:
        return np.array([getattr(s, _FIELDS[observable]) for s in self.samples])

    def mean(self, observable: str) -> float:
        return float(self.values(observable).mean())

    def variance(self, observable: str) -> float:
        return float(self.values(observable).var())


def accumulate(stream, sigma2: float, grid_shape) -> EnsembleTable:
    """Collect a stream of samples into one table; rejects mixed parameters."""
    table = EnsembleTable(sigma2, tuple(grid_shape))
    for s in stream:
        table.add(s)
    return table


@dataclass(frozen=True)
class DensityTable:
    bin_left: np.ndarray
    bin_right: np.ndarray
    density: np.ndarray
    degenerate: bool = False


def histogram(samples, bins="fd") -> DensityTable:
    """Density-normalized histogram (integral = 1); Freedman-Diaconis by default."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise StatsError("need at least 2 samples to histogram")
    if np.all(x == x[0]):
        return DensityTable(np.array([x[0]]), np.array([x[0]]), np.array([np.inf]), degenerate=True)
    edges = np.histogram_bin_edges(x, bins=bins)
    dens, edges = np.histogram(x, bins=edges, density=True)
    return DensityTable(edges[:-1], edges[1:], dens)


@dataclass(frozen=True)
class FitResult:
    family: str  # 'lognormal' | 'exponential-power'
    mu: float
    sigma: float
    k: float | None  # exponent; None for lognormal
    loglik: float
    degenerate: bool = False

    def cdf(self, x):
        if self.family == "lognormal":
            return sps.lognorm.cdf(x, s=self.sigma, scale=math.exp(self.mu))
        return sps.gennorm.cdf(x, beta=self.k, loc=self.mu, scale=self.sigma)

    def pdf(self, x):
        if self.family == "lognormal":
            return sps.lognorm.pdf(x, s=self.sigma, scale=math.exp(self.mu))
        return sps.gennorm.pdf(x, beta=self.k, loc=self.mu, scale=self.sigma)


def fit_lognormal(samples) -> FitResult:
    """Closed-form MLE: mu = mean(log x), sigma = population std(log x)."""
    x = np.asarray(samples, dtype=float)
    if np.any(x <= 0):
        bad = float(x[x <= 0][0])
        raise StatsError(f"lognormal fit requires positive samples; found {bad!r}")
    logs = np.log(x)
    mu = float(logs.mean())
    sigma = float(logs.std())
    if sigma == 0.0:
        return FitResult("lognormal", mu, 0.0, None, math.inf, degenerate=True)
    loglik = float(sps.lognorm.logpdf(x, s=sigma, scale=math.exp(mu)).sum())
    return FitResult("lognormal", mu, sigma, None, loglik)


def fit_exp_power(samples, maxiter: int = 4000) -> FitResult:
    """Numerical MLE of the exponential-power (generalized normal) density
    (1 / (2 sigma Gamma(1+1/k))) exp(-(|x - mu| / sigma)^k), by Nelder-Mead
    from a moment-based start (k = 2, Gaussian)."""
    x = np.asarray(samples, dtype=float)
    if x.size < 10:
        raise StatsError("need at least 10 samples for the exponential-power fit")
    mu0 = float(np.median(x))
    sigma0 = float(np.std(x)) * math.sqrt(2.0)  # Var = sigma^2/2 at k = 2
    if sigma0 == 0.0:
        raise StatsError("degenerate sample: zero spread")

    def nll(theta):
        mu, log_sigma, log_k = theta
        lp = sps.gennorm.logpdf(x, beta=math.exp(log_k), loc=mu, scale=math.exp(log_sigma))
        return -float(lp.sum())

    res = optimize.minimize(
        nll,
        x0=np.array([mu0, math.log(sigma0), math.log(2.0)]),
        method="Nelder-Mead",
        options={"maxiter": maxiter, "xatol": 1e-8, "fatol": 1e-10},
    )
    if not res.success:
        raise StatsError(f"exponential-power MLE did not converge; last iterate {res.x}")
    mu, log_sigma, log_k = res.x
    return FitResult("exponential-power", float(mu), math.exp(log_sigma), math.exp(log_k), -res.fun)


@dataclass(frozen=True)
class KsResult:
    statistic: float  # one-sided D+
    critical: float  # asymptotic 95% critical value
    passed: bool


KS_COEFF_95 = math.sqrt(math.log(1.0 / 0.05) / 2.0)  # ~1.2239


def ks_test(samples, cdf) -> KsResult:
    """One-sided KS: D+ = sup(ECDF - CDF), passed iff D+ <= 1.2239/sqrt(n).

    `cdf` is a FitResult or any callable evaluating the fitted CDF.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise StatsError("KS test needs at least one sample")
    f = cdf.cdf if isinstance(cdf, FitResult) else cdf
    d_plus = float(np.max(np.arange(1, n + 1) / n - f(x)))
    crit = KS_COEFF_95 / math.sqrt(n)
    return KsResult(d_plus, crit, d_plus <= crit)


# -- CSV artifacts -----------------------------------------------------------

SAMPLES_HEADER = [
    "realization_id", "sigma2", "p_center", "p_08Y",
    "qx_star", "qy_star", "Qy_star", "conservation_dev",
]
FITS_HEADER = [
    "sigma2", "observable", "family", "mu", "sigma", "k",
    "loglik", "ks_stat", "ks_crit", "ks_pass",
]
HISTOGRAMS_HEADER = ["sigma2", "observable", "bin_left", "bin_right", "density"]


def write_samples_csv(tables, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SAMPLES_HEADER)
        for table in tables:
            for s in sorted(table.samples, key=lambda s: s.realization_id):
                w.writerow([
                    s.realization_id, repr(s.sigma2), repr(s.p_center), repr(s.p_08y),
                    repr(s.qx_star), repr(s.qy_star), repr(s.qy_total_star),
                    repr(s.conservation_dev),
                ])


def read_samples_csv(path):
    """Back into ObservableSample lists grouped by sigma2 (insertion order)."""
    groups: dict[float, list[ObservableSample]] = {}
    with open(path, newline="") as fh:
        r = csv.DictReader(fh)
        if r.fieldnames != SAMPLES_HEADER:
            raise StatsError(f"unexpected samples.csv header {r.fieldnames}")
        for row in r:
            s = ObservableSample(
                realization_id=int(row["realization_id"]),
                sigma2=float(row["sigma2"]),
                p_center=float(row["p_center"]),
                p_08y=float(row["p_08Y"]),
                qx_star=float(row["qx_star"]),
                qy_star=float(row["qy_star"]),
                qy_total_star=float(row["Qy_star"]),
                conservation_dev=float(row["conservation_dev"]),
            )
            groups.setdefault(s.sigma2, []).append(s)
    return groups


def write_fits_csv(rows, path):
    """rows: iterable of (sigma2, observable, FitResult, KsResult)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(FITS_HEADER)
        for sigma2, obs, fit, ks in rows:
            w.writerow([
                repr(sigma2), obs, fit.family, repr(fit.mu), repr(fit.sigma),
                "" if fit.k is None else repr(fit.k), repr(fit.loglik),
                repr(ks.statistic), repr(ks.critical), int(ks.passed),
            ])


def write_histograms_csv(rows, path):
    """rows: iterable of (sigma2, observable, DensityTable)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HISTOGRAMS_HEADER)
        for sigma2, obs, table in rows:
            for left, right, dens in zip(table.bin_left, table.bin_right, table.density):
                w.writerow([repr(sigma2), obs, repr(float(left)), repr(float(right)), repr(float(dens))])


def fit_ensemble(table: EnsembleTable):
    """Standard fit battery: lognormal for the pressures and main flows,
    exponential power for the transverse flow; one-sided KS on each."""
    rows = []
    for obs in OBSERVABLES:
        vals = table.values(obs)
        if obs == "qx_star":
            fit = fit_exp_power(vals)
        else:
            fit = fit_lognormal(vals)
        ks = ks_test(vals, fit)
        rows.append((table.sigma2, obs, fit, ks))
    return rows
