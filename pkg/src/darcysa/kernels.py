"""Numba sweep kernels for the annealer.

Each kernel visits every cell once in lexicographic (i, j, k) order and
updates the pressure in place. Randomness comes in as pre-drawn arrays so
that the caller owns the RNG stream.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def _incident(p, tx, ty, tz, ty_in, ty_out, p_in, p_out, i, j, k):
    nx, ny, nz = p.shape
    st = 0.0
    stp = 0.0
    if i > 0:
        t = tx[i - 1, j, k]; st += t; stp += t * p[i - 1, j, k]
    if i < nx - 1:
        t = tx[i, j, k]; st += t; stp += t * p[i + 1, j, k]
    if j > 0:
        t = ty[i, j - 1, k]; st += t; stp += t * p[i, j - 1, k]
    else:
        t = ty_in[i, k]; st += t; stp += t * p_in
    if j < ny - 1:
        t = ty[i, j, k]; st += t; stp += t * p[i, j + 1, k]
    else:
        t = ty_out[i, k]; st += t; stp += t * p_out
    if k > 0:
        t = tz[i, j, k - 1]; st += t; stp += t * p[i, j, k - 1]
    if k < nz - 1:
        t = tz[i, j, k]; st += t; stp += t * p[i, j, k + 1]
    return st, stp


@numba.njit(cache=True)
def metropolis_sweep(
    p, tx, ty, tz, ty_in, ty_out, p_in, p_out, temperature, width, offsets, uniforms, greedy
):
    """One full-lattice sweep. Proposal: p + width*offset, offset ~ U(-1, 1).

    Accepts when dS < 0; otherwise, unless greedy, with probability
    exp(-dS / temperature). Returns the number of accepted proposals.
    """
    nx, ny, nz = p.shape
    accepted = 0
    idx = 0
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                st, stp = _incident(p, tx, ty, tz, ty_in, ty_out, p_in, p_out, i, j, k)
                old = p[i, j, k]
                new = old + width * offsets[idx]
                ds = 0.5 * st * (new * new - old * old) - stp * (new - old)
                if ds < 0.0:
                    p[i, j, k] = new
                    accepted += 1
                elif not greedy and uniforms[idx] < np.exp(-ds / temperature):
                    p[i, j, k] = new
                    accepted += 1
                idx += 1
    return accepted


@numba.njit(cache=True)
def greedy_adaptive_sweep(
    p, tx, ty, tz, ty_in, ty_out, p_in, p_out, widths, offsets, up, down, w_min, w_max
):
    """Greedy sweep with one proposal width per cell, adapted on the fly:
    accepted -> widths *= up, rejected -> widths *= down. This keeps each
    cell's step at its own local scale, which a single global width cannot
    do once only smooth long-wavelength error remains."""
    nx, ny, nz = p.shape
    accepted = 0
    idx = 0
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                st, stp = _incident(p, tx, ty, tz, ty_in, ty_out, p_in, p_out, i, j, k)
                old = p[i, j, k]
                new = old + widths[i, j, k] * offsets[idx]
                ds = 0.5 * st * (new * new - old * old) - stp * (new - old)
                if ds < 0.0:
                    p[i, j, k] = new
                    accepted += 1
                    w = widths[i, j, k] * up
                else:
                    w = widths[i, j, k] * down
                widths[i, j, k] = min(w_max, max(w_min, w))
                idx += 1
    return accepted


@numba.njit(cache=True)
def overrelax_sweep(p, tx, ty, tz, ty_in, ty_out, p_in, p_out):
    """Reflection about the per-cell minimizer: p <- 2 p* - p. Leaves the
    action unchanged per update in exact arithmetic, so no accept step."""
    nx, ny, nz = p.shape
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                st, stp = _incident(p, tx, ty, tz, ty_in, ty_out, p_in, p_out, i, j, k)
                p[i, j, k] = 2.0 * stp / st - p[i, j, k]
