"""Rectangular 3-D lattice, physical domain and boundary conditions.

Cell-centered layout: pressure and permeability live at cell centers,
fluxes at faces. Flow is driven along y by Dirichlet heads imposed on
the two y-boundary face planes; the four x/z boundaries are no-flow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator


class GridError(ValueError):
    """Invalid grid geometry or out-of-range index."""


@dataclass(frozen=True)
class GridSpec:
    """Lattice dimensions and physical extents [m]. Cell sizes are derived."""

    nx: int
    ny: int
    nz: int
    lx: float
    ly: float
    lz: float

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 1:
            raise GridError("cell counts nx, ny, nz must be >= 1")
        if min(self.lx, self.ly, self.lz) <= 0:
            raise GridError("extents lx, ly, lz must be > 0")

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def dz(self) -> float:
        return self.lz / self.nz

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny * self.nz

    # face areas by orientation
    @property
    def area_x(self) -> float:
        return self.dy * self.dz

    @property
    def area_y(self) -> float:
        return self.dx * self.dz

    @property
    def area_z(self) -> float:
        return self.dx * self.dy


@dataclass(frozen=True)
class BoundaryConditions:
    """Dirichlet heads [m] on the y=0 (inlet) and y=ly (outlet) face planes.

    All x/z boundaries are no-flow; they carry exactly zero flux in every
    solver by construction.
    """

    inlet_pressure: float
    outlet_pressure: float

    def __post_init__(self):
        if not (math.isfinite(self.inlet_pressure) and math.isfinite(self.outlet_pressure)):
            raise GridError("boundary heads must be finite")

    @property
    def dp(self) -> float:
        return self.inlet_pressure - self.outlet_pressure


CellIndex = tuple[int, int, int]


@dataclass(frozen=True)
class FaceIndex:
    """A face identified by orientation and its lower-adjacent cell.

    For y-faces, j ranges over -1 .. ny-1: j == -1 is the inlet boundary
    face below cell (i, 0, k); j == ny-1 is the outlet boundary face above
    cell (i, ny-1, k); other j are interior faces between j and j+1.
    x- and z-faces are interior only (no-flow boundaries carry no face).
    """

    axis: str  # 'x' | 'y' | 'z'
    i: int
    j: int
    k: int

    def is_boundary(self, g: GridSpec) -> bool:
        return self.axis == "y" and self.j in (-1, g.ny - 1)


def linearize(c: CellIndex, g: GridSpec) -> int:
    """C-order linear index of cell (i, j, k); bijection onto [0, n_cells)."""
    i, j, k = c
    if not (0 <= i < g.nx and 0 <= j < g.ny and 0 <= k < g.nz):
        raise GridError(f"cell index {c} out of range for grid {g.shape}")
    return (i * g.ny + j) * g.nz + k


def delinearize(idx: int, g: GridSpec) -> CellIndex:
    """Inverse of linearize."""
    if not 0 <= idx < g.n_cells:
        raise GridError(f"linear index {idx} out of range")
    i, rem = divmod(idx, g.ny * g.nz)
    j, k = divmod(rem, g.nz)
    return (i, j, k)


def faces(g: GridSpec) -> Iterator[FaceIndex]:
    """All interior faces plus the 2*nx*nz Dirichlet boundary y-faces."""
    for i in range(g.nx - 1):
        for j in range(g.ny):
            for k in range(g.nz):
                yield FaceIndex("x", i, j, k)
    for i in range(g.nx):
        for j in range(-1, g.ny):  # -1 = inlet face, ny-1 = outlet face
            for k in range(g.nz):
                yield FaceIndex("y", i, j, k)
    for i in range(g.nx):
        for j in range(g.ny):
            for k in range(g.nz - 1):
                yield FaceIndex("z", i, j, k)


def locate(fractional: tuple[float, float, float], g: GridSpec) -> CellIndex:
    """Cell whose center is nearest to (fx*lx, fy*ly, fz*lz).

    A point exactly on a face between two cells is assigned the
    higher-index cell (containing-cell convention, i = floor(f*n)),
    so e.g. f=0.5 with an even count maps to the cell just above the
    midplane. f=1 clamps to the last cell.
    """
    out = []
    for f, n in zip(fractional, g.shape):
        if not 0.0 <= f <= 1.0:
            raise GridError(f"fractional coordinate {f} outside [0, 1]")
        out.append(min(int(math.floor(f * n)), n - 1))
    return tuple(out)
