"""Closed-form densities evaluated from fitted parameters.

The fit CSV is the single source of truth: curves are drawn from its
(mu, sigma, k) columns verbatim, never re-fitted from the samples.
"""

import math

import numpy as np


def lognormal_pdf(x, mu: float, sigma: float):
    """Density of exp(N(mu, sigma^2)); zero for x <= 0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    z = (np.log(x[pos]) - mu) / sigma
    out[pos] = np.exp(-0.5 * z * z) / (x[pos] * sigma * math.sqrt(2.0 * math.pi))
    return out


def exp_power_pdf(x, mu: float, sigma: float, k: float):
    """Exponential-power density
    (1 / (2 sigma Gamma(1 + 1/k))) exp(-(|x - mu| / sigma)^k)."""
    x = np.asarray(x, dtype=float)
    norm = 1.0 / (2.0 * sigma * math.gamma(1.0 + 1.0 / k))
    return norm * np.exp(-np.abs((x - mu) / sigma) ** k)
