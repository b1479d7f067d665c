"""Finite-volume reference solver: 7-point SPD system, Jacobi-preconditioned CG."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .darcy import PressureState, ScalarField, Transmissibilities, boundary_source, transmissibilities
from .grid import BoundaryConditions, GridSpec


class SolveError(RuntimeError):
    def __init__(self, msg, achieved_residual=None):
        super().__init__(msg)
        self.achieved_residual = achieved_residual


@dataclass(frozen=True)
class LinearSystem:
    """A p = b for the cell pressures, C-order cell numbering."""

    grid: GridSpec
    a: sp.csr_matrix
    b: np.ndarray


def assemble(T: Transmissibilities, g: GridSpec, bc: BoundaryConditions) -> LinearSystem:
    """Diagonal = sum of incident T_f; off-diagonal = -T_f; b carries the
    Dirichlet boundary-face contributions. No-flow faces contribute nothing."""
    n = g.n_cells
    diag = np.zeros(g.shape)
    rows, cols, vals = [], [], []
    lin = np.arange(n).reshape(g.shape)

    for axis, t in (("x", T.tx), ("y", T.ty), ("z", T.tz)):
        if t.size == 0:
            continue
        if axis == "x":
            lo, hi = lin[:-1, :, :], lin[1:, :, :]
        elif axis == "y":
            lo, hi = lin[:, :-1, :], lin[:, 1:, :]
        else:
            lo, hi = lin[:, :, :-1], lin[:, :, 1:]
        np.add.at(diag.reshape(-1), lo.ravel(), t.ravel())
        np.add.at(diag.reshape(-1), hi.ravel(), t.ravel())
        rows.append(lo.ravel()); cols.append(hi.ravel()); vals.append(-t.ravel())
        rows.append(hi.ravel()); cols.append(lo.ravel()); vals.append(-t.ravel())
    # Dirichlet boundary y-faces
    np.add.at(diag.reshape(-1), lin[:, 0, :].ravel(), T.ty_in.ravel())
    np.add.at(diag.reshape(-1), lin[:, -1, :].ravel(), T.ty_out.ravel())

    rows.append(np.arange(n)); cols.append(np.arange(n)); vals.append(diag.ravel())
    a = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsr()
    b = boundary_source(T, bc).ravel()
    return LinearSystem(g, a, b)


def solve_linear(sys: LinearSystem, bc: BoundaryConditions, rel_tol: float = 1e-10) -> PressureState:
    """Solve to ||Ap - b|| / ||b|| <= rel_tol with Jacobi-preconditioned CG."""
    a, b = sys.a, sys.b
    nb = np.linalg.norm(b)
    if nb == 0.0:
        # dp = 0: the unique solution is the constant boundary head
        vals = np.full(sys.grid.shape, bc.inlet_pressure)
        return PressureState(sys.grid, bc, vals)
    inv_diag = 1.0 / a.diagonal()
    m = spla.LinearOperator(a.shape, matvec=lambda x: inv_diag * x)
    x, info = spla.cg(a, b, rtol=rel_tol * 1e-2, atol=0.0, maxiter=20 * a.shape[0], M=m)
    achieved = np.linalg.norm(a @ x - b) / nb
    if info != 0 or achieved > rel_tol:
        raise SolveError(f"CG did not reach rel_tol={rel_tol}", achieved_residual=achieved)
    return PressureState(sys.grid, bc, x.reshape(sys.grid.shape))


def reference_solution(
    K: ScalarField,
    g: GridSpec,
    bc: BoundaryConditions,
    rule: str = "harmonic",
    rel_tol: float = 1e-10,
) -> PressureState:
    """Assemble-and-solve convenience path used as the annealer oracle."""
    T = transmissibilities(K, g, rule)
    return solve_linear(assemble(T, g, bc), bc, rel_tol)
