"""Mean-zero Gaussian log-permeability fields via circulant embedding.

The stationary covariance is embedded on a periodic torus at least twice
the grid size per axis; the block-circulant spectrum comes from one FFT,
and each realization costs one more FFT of the embedding size. K = e^L.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .darcy import ScalarField
from .grid import GridSpec


class FieldError(ValueError):
    pass


class EmbeddingError(FieldError):
    """The periodic embedding has negative eigenvalues beyond tolerance."""


KERNELS = ("exponential", "gaussian")


@dataclass(frozen=True)
class CovarianceSpec:
    """Stationary covariance of the log-permeability: variance sigma2 and
    anisotropic correlation lengths [m].

    'exponential': C(h) = sigma2 * exp(-sqrt(sum (h_a/lambda_a)^2))
    'gaussian':    C(h) = sigma2 * exp(-sum (h_a/lambda_a)^2)
    """

    variance: float
    corr_len: tuple[float, float, float]
    model: str = "exponential"

    def __post_init__(self):
        if self.variance < 0:
            raise FieldError("variance must be >= 0")
        if min(self.corr_len) <= 0:
            raise FieldError("correlation lengths must be > 0")
        if self.model not in KERNELS:
            raise FieldError(f"unknown kernel {self.model!r}; choose from {KERNELS}")

    def kernel(self, hx, hy, hz):
        """Covariance at lag (hx, hy, hz) [m]; arrays broadcast."""
        lx, ly, lz = self.corr_len
        u2 = (hx / lx) ** 2 + (hy / ly) ** 2 + (hz / lz) ** 2
        if self.model == "exponential":
            return self.variance * np.exp(-np.sqrt(u2))
        return self.variance * np.exp(-u2)


@dataclass(frozen=True)
class EmbeddingPlan:
    """Periodic embedding of the covariance with its FFT spectrum."""

    grid: GridSpec
    cov: CovarianceSpec
    shape: tuple[int, int, int]  # embedding sizes, >= 2n per axis
    spectrum: np.ndarray  # eigenvalues of the block-circulant matrix, clamped >= 0
    min_eigenvalue: float  # before clamping
    valid: bool


def _next_pow2(n: int) -> int:
    m = 1
    while m < n:
        m *= 2
    return m


def _torus_lags(m: int, delta: float) -> np.ndarray:
    t = np.arange(m)
    return np.minimum(t, m - t) * delta


def plan_embedding(
    c: CovarianceSpec, g: GridSpec, max_enlarge: int = 3, tol_factor: float = 1e-10
) -> EmbeddingPlan:
    """Build the block-circulant embedding, doubling the embedding size up to
    max_enlarge times if the spectrum has negative eigenvalues beyond
    tol = tol_factor * sigma2 (eigenvalues in [-tol, 0) are clamped to 0)."""
    tol = tol_factor * max(c.variance, 1e-300)
    base = tuple(_next_pow2(2 * n) for n in g.shape)
    deltas = (g.dx, g.dy, g.dz)
    last_min = np.inf
    for attempt in range(max_enlarge + 1):
        shape = tuple(m * 2**attempt for m in base)
        hx = _torus_lags(shape[0], deltas[0])[:, None, None]
        hy = _torus_lags(shape[1], deltas[1])[None, :, None]
        hz = _torus_lags(shape[2], deltas[2])[None, None, :]
        cov = c.kernel(hx, hy, hz)
        lam = np.fft.fftn(cov).real
        last_min = float(lam.min())
        if last_min >= -tol:
            lam = np.where(lam < 0.0, 0.0, lam)
            return EmbeddingPlan(g, c, shape, lam, last_min, True)
    raise EmbeddingError(
        f"embedding spectrum has min eigenvalue {last_min:.3e} < -{tol:.3e} "
        f"after {max_enlarge} enlargements; try a smoother kernel or larger max_enlarge"
    )


def sample_log_field(plan: EmbeddingPlan, seed) -> ScalarField:
    """One realization of the mean-zero field L on plan.grid; deterministic in seed."""
    if not plan.valid:
        raise EmbeddingError("cannot sample from an invalid embedding plan")
    rng = np.random.default_rng(seed)
    shape = plan.shape
    eps = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    amp = np.sqrt(plan.spectrum / np.prod(shape))
    w = np.fft.fftn(amp * eps)
    g = plan.grid
    values = np.ascontiguousarray(w.real[: g.nx, : g.ny, : g.nz])
    return ScalarField(g, values)


def exponentiate(L: ScalarField) -> ScalarField:
    """K = exp(L), strictly positive; rejects values that would overflow."""
    bad = ~np.isfinite(L.values) | (np.abs(L.values) > 700.0)
    if np.any(bad):
        cell = tuple(int(x) for x in np.argwhere(bad)[0])
        raise FieldError(f"log-permeability at cell {cell} not exponentiable")
    return ScalarField(L.grid, np.exp(L.values))


def save_field(field: ScalarField, path, seed=None) -> None:
    """CSV dump: one header line (nx, ny, nz, lx, ly, lz, seed), then one value per line."""
    g = field.grid
    with open(path, "w") as fh:
        fh.write(f"{g.nx},{g.ny},{g.nz},{g.lx!r},{g.ly!r},{g.lz!r},{'' if seed is None else seed}\n")
        for v in field.values.ravel():
            fh.write(f"{float(v)!r}\n")


def load_field(path) -> ScalarField:
    with open(path) as fh:
        head = fh.readline().strip().split(",")
        nx, ny, nz = (int(x) for x in head[:3])
        lx, ly, lz = (float(x) for x in head[3:6])
        vals = np.array([float(line) for line in fh])
    g = GridSpec(nx, ny, nz, lx, ly, lz)
    return ScalarField(g, vals.reshape(g.shape))
