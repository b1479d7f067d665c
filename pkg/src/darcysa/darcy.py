"""Discrete kernels shared by both solvers.

Face transmissibilities, the quadratic energy of a pressure field,
its single-cell variation, the mass-balance residual used as the
convergence monitor, and face fluxes / cell velocities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import BoundaryConditions, CellIndex, GridSpec


class DarcyError(ValueError):
    pass


@dataclass(frozen=True)
class ScalarField:
    """Cell-centered values over the lattice (log-permeability, permeability, ...)."""

    grid: GridSpec
    values: np.ndarray  # shape (nx, ny, nz)

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise DarcyError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )


@dataclass(frozen=True)
class Transmissibilities:
    """One T = K_face * A_f / d_f per face, grouped by orientation.

    tx[i,j,k] couples cells (i,j,k)-(i+1,j,k); ty, tz likewise along y, z.
    ty_in / ty_out are the Dirichlet boundary y-faces, with the half-cell
    distance d = dy/2.
    """

    grid: GridSpec
    tx: np.ndarray  # (nx-1, ny, nz)
    ty: np.ndarray  # (nx, ny-1, nz)
    tz: np.ndarray  # (nx, ny, nz-1)
    ty_in: np.ndarray  # (nx, nz), face j=0 plane
    ty_out: np.ndarray  # (nx, nz), face j=ny plane


@dataclass
class PressureState:
    """Pressure per cell [m] plus the fixed boundary heads."""

    grid: GridSpec
    bc: BoundaryConditions
    values: np.ndarray  # (nx, ny, nz), mutable (annealer owns it)

    def copy(self) -> "PressureState":
        return PressureState(self.grid, self.bc, self.values.copy())


def transmissibilities(K: ScalarField, g: GridSpec, rule: str = "harmonic") -> Transmissibilities:
    """Face transmissibilities from a strictly positive permeability field.

    rule='harmonic': T = (A/d) * 2*Ka*Kb/(Ka+Kb), the standard conservative
    finite-volume choice. rule='one_sided': T = (A/d) * K of the
    higher-index adjacent cell (kept for fidelity experiments).
    Boundary y-faces always use the adjacent cell's K over d = dy/2.
    """
    kv = K.values
    if np.any(kv <= 0):
        raise DarcyError("permeability must be strictly positive everywhere")
    if rule == "harmonic":
        def avg(a, b):
            return 2.0 * a * b / (a + b)
    elif rule == "one_sided":
        def avg(a, b):
            return b  # higher-index cell of the pair
    else:
        raise DarcyError(f"unknown face-average rule {rule!r}")

    tx = (g.area_x / g.dx) * avg(kv[:-1, :, :], kv[1:, :, :])
    ty = (g.area_y / g.dy) * avg(kv[:, :-1, :], kv[:, 1:, :])
    tz = (g.area_z / g.dz) * avg(kv[:, :, :-1], kv[:, :, 1:])
    ty_in = (g.area_y / (0.5 * g.dy)) * kv[:, 0, :]
    ty_out = (g.area_y / (0.5 * g.dy)) * kv[:, -1, :]
    return Transmissibilities(g, tx, ty, tz, ty_in.copy(), ty_out.copy())


def action(p: PressureState, T: Transmissibilities) -> float:
    """Quadratic energy S = 1/2 sum_faces T_f (p_a - p_b)^2, boundary faces included."""
    v = p.values
    s = 0.0
    s += np.sum(T.tx * (v[1:, :, :] - v[:-1, :, :]) ** 2)
    s += np.sum(T.ty * (v[:, 1:, :] - v[:, :-1, :]) ** 2)
    s += np.sum(T.tz * (v[:, :, 1:] - v[:, :, :-1]) ** 2)
    s += np.sum(T.ty_in * (v[:, 0, :] - p.bc.inlet_pressure) ** 2)
    s += np.sum(T.ty_out * (v[:, -1, :] - p.bc.outlet_pressure) ** 2)
    return 0.5 * float(s)


def incident(p: PressureState, T: Transmissibilities, cell: CellIndex) -> tuple[float, float]:
    """(sum of incident T_f, sum of T_f * neighbor value) for one cell.

    Boundary y-faces contribute the fixed boundary head as the neighbor.
    """
    i, j, k = cell
    g = p.grid
    v = p.values
    st = 0.0
    stp = 0.0
    if i > 0:
        t = T.tx[i - 1, j, k]; st += t; stp += t * v[i - 1, j, k]
    if i < g.nx - 1:
        t = T.tx[i, j, k]; st += t; stp += t * v[i + 1, j, k]
    if j > 0:
        t = T.ty[i, j - 1, k]; st += t; stp += t * v[i, j - 1, k]
    else:
        t = T.ty_in[i, k]; st += t; stp += t * p.bc.inlet_pressure
    if j < g.ny - 1:
        t = T.ty[i, j, k]; st += t; stp += t * v[i, j + 1, k]
    else:
        t = T.ty_out[i, k]; st += t; stp += t * p.bc.outlet_pressure
    if k > 0:
        t = T.tz[i, j, k - 1]; st += t; stp += t * v[i, j, k - 1]
    if k < g.nz - 1:
        t = T.tz[i, j, k]; st += t; stp += t * v[i, j, k + 1]
    return st, stp


def local_action_delta(
    p: PressureState, T: Transmissibilities, cell: CellIndex, new_value: float
) -> float:
    """S(p with cell -> new_value) - S(p), from the <= 6 incident faces only."""
    st, stp = incident(p, T, cell)
    old = p.values[cell]
    return 0.5 * st * (new_value**2 - old**2) - stp * (new_value - old)


def local_minimizer(p: PressureState, T: Transmissibilities, cell: CellIndex) -> float:
    """The unique minimizer of S in the given cell's coordinate (transmissibility-weighted
    mean of the neighbor values, boundary heads included)."""
    st, stp = incident(p, T, cell)
    return stp / st


def boundary_source(T: Transmissibilities, bc: BoundaryConditions) -> np.ndarray:
    """Right-hand-side b of the equivalent linear system, as a (nx, ny, nz) array."""
    g = T.grid
    b = np.zeros(g.shape)
    b[:, 0, :] += T.ty_in * bc.inlet_pressure
    b[:, -1, :] += T.ty_out * bc.outlet_pressure
    return b


def net_influx(p: PressureState, T: Transmissibilities) -> np.ndarray:
    """Discrete div(K grad p) per cell: sum_f T_f (p_neighbor - p_cell)."""
    v = p.values
    r = np.zeros_like(v)
    dxp = T.tx * (v[1:, :, :] - v[:-1, :, :])
    r[:-1, :, :] += dxp
    r[1:, :, :] -= dxp
    dyp = T.ty * (v[:, 1:, :] - v[:, :-1, :])
    r[:, :-1, :] += dyp
    r[:, 1:, :] -= dyp
    dzp = T.tz * (v[:, :, 1:] - v[:, :, :-1])
    r[:, :, :-1] += dzp
    r[:, :, 1:] -= dzp
    r[:, 0, :] += T.ty_in * (p.bc.inlet_pressure - v[:, 0, :])
    r[:, -1, :] += T.ty_out * (p.bc.outlet_pressure - v[:, -1, :])
    return r


def residual(p: PressureState, T: Transmissibilities) -> float:
    """Normalized mass-balance residual ||r||_2 / ||b||_2; zero at the exact minimizer.

    With dp = 0 the source vector vanishes and the unnormalized ||r||_2 is
    returned instead.
    """
    r = net_influx(p, T)
    b = boundary_source(T, p.bc)
    nb = np.linalg.norm(b)
    nr = float(np.linalg.norm(r))
    if nb == 0.0:
        return nr
    return nr / float(nb)


@dataclass(frozen=True)
class FaceFluxes:
    """Signed face fluxes [L^3 T^-1], positive along the +axis direction.

    Arrays cover all face planes including boundaries; no-flow x/z
    boundary planes are identically zero by construction.
    """

    grid: GridSpec
    fx: np.ndarray  # (nx+1, ny, nz)
    fy: np.ndarray  # (nx, ny+1, nz)
    fz: np.ndarray  # (nx, ny, nz+1)


def face_flux(p: PressureState, T: Transmissibilities) -> FaceFluxes:
    """Q_f = T_f * (p_lower - p_upper) per face; boundary y-faces use the fixed heads."""
    g = p.grid
    v = p.values
    fx = np.zeros((g.nx + 1, g.ny, g.nz))
    fx[1:-1, :, :] = T.tx * (v[:-1, :, :] - v[1:, :, :])
    fy = np.zeros((g.nx, g.ny + 1, g.nz))
    fy[:, 1:-1, :] = T.ty * (v[:, :-1, :] - v[:, 1:, :])
    fy[:, 0, :] = T.ty_in * (p.bc.inlet_pressure - v[:, 0, :])
    fy[:, -1, :] = T.ty_out * (v[:, -1, :] - p.bc.outlet_pressure)
    fz = np.zeros((g.nx, g.ny, g.nz + 1))
    fz[:, :, 1:-1] = T.tz * (v[:, :, :-1] - v[:, :, 1:])
    return FaceFluxes(g, fx, fy, fz)


def cell_velocities(fluxes: FaceFluxes) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cell-center velocity components: mean of the two incident face fluxes / face area."""
    g = fluxes.grid
    qx = 0.5 * (fluxes.fx[:-1, :, :] + fluxes.fx[1:, :, :]) / g.area_x
    qy = 0.5 * (fluxes.fy[:, :-1, :] + fluxes.fy[:, 1:, :]) / g.area_y
    qz = 0.5 * (fluxes.fz[:, :, :-1] + fluxes.fz[:, :, 1:]) / g.area_z
    return qx, qy, qz
