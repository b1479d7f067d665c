import pytest
from hypothesis import given, strategies as st

from darcysa import BoundaryConditions, GridSpec, delinearize, faces, linearize, locate
from darcysa.grid import FaceIndex, GridError


def test_grid_cell_sizes_and_areas():
    g = GridSpec(50, 70, 50, 40.0, 85.0, 25.0)
    assert g.dx == pytest.approx(0.8)
    assert g.dy == pytest.approx(85.0 / 70.0)
    assert g.dz == pytest.approx(0.5)
    assert g.n_cells == 175000
    assert g.area_x == pytest.approx(g.dy * g.dz)
    assert g.area_y == pytest.approx(g.dx * g.dz)
    assert g.area_z == pytest.approx(g.dx * g.dy)


@pytest.mark.parametrize("bad", [
    dict(nx=0, ny=2, nz=2, lx=1.0, ly=1.0, lz=1.0),
    dict(nx=2, ny=2, nz=2, lx=0.0, ly=1.0, lz=1.0),
    dict(nx=2, ny=-1, nz=2, lx=1.0, ly=1.0, lz=1.0),
])
def test_grid_validation(bad):
    with pytest.raises(GridError):
        GridSpec(**bad)


def test_bc_requires_finite_heads():
    with pytest.raises(GridError):
        BoundaryConditions(float("nan"), 0.0)
    assert BoundaryConditions(1.0, 0.0).dp == 1.0


def test_linearize_corners():
    g = GridSpec(4, 5, 3, 1.0, 1.0, 1.0)
    assert linearize((0, 0, 0), g) == 0
    assert linearize((3, 4, 2), g) == g.n_cells - 1


def test_linearize_roundtrip_exhaustive():
    g = GridSpec(4, 5, 3, 1.0, 1.0, 1.0)
    seen = set()
    for i in range(4):
        for j in range(5):
            for k in range(3):
                idx = linearize((i, j, k), g)
                assert 0 <= idx < g.n_cells
                assert delinearize(idx, g) == (i, j, k)
                seen.add(idx)
    assert len(seen) == g.n_cells


@given(st.integers(1, 9), st.integers(1, 9), st.integers(1, 9), st.data())
def test_linearize_roundtrip_property(nx, ny, nz, data):
    g = GridSpec(nx, ny, nz, 1.0, 1.0, 1.0)
    c = (
        data.draw(st.integers(0, nx - 1)),
        data.draw(st.integers(0, ny - 1)),
        data.draw(st.integers(0, nz - 1)),
    )
    assert delinearize(linearize(c, g), g) == c


def test_linearize_out_of_range():
    g = GridSpec(2, 2, 2, 1.0, 1.0, 1.0)
    with pytest.raises(GridError):
        linearize((2, 0, 0), g)
    with pytest.raises(GridError):
        delinearize(8, g)


def test_face_counts_tiny():
    g = GridSpec(1, 2, 1, 1.0, 2.0, 1.0)
    fs = list(faces(g))
    assert len(fs) == 3
    boundary = [f for f in fs if f.is_boundary(g)]
    assert len(boundary) == 2
    interior = [f for f in fs if not f.is_boundary(g)]
    assert interior == [FaceIndex("y", 0, 0, 0)]


def test_face_counts_2x2x2():
    g = GridSpec(2, 2, 2, 1.0, 1.0, 1.0)
    fs = list(faces(g))
    interior = [f for f in fs if not f.is_boundary(g)]
    boundary = [f for f in fs if f.is_boundary(g)]
    assert len(interior) == 12  # 4 per axis
    assert len(boundary) == 8


def test_face_count_formula_large():
    g = GridSpec(50, 70, 50, 40.0, 85.0, 25.0)
    # count by formula instead of enumerating 600k faces
    n_interior_y = g.nx * (g.ny - 1) * g.nz
    assert n_interior_y == 172500


@given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5))
def test_face_count_property(nx, ny, nz):
    g = GridSpec(nx, ny, nz, 1.0, 1.0, 1.0)
    fs = list(faces(g))
    expected = (
        (nx - 1) * ny * nz + nx * (ny - 1) * nz + nx * ny * (nz - 1) + 2 * nx * nz
    )
    assert len(fs) == expected
    assert sum(f.is_boundary(g) for f in fs) == 2 * nx * nz


def test_locate_center_and_corners():
    g = GridSpec(50, 70, 50, 40.0, 85.0, 25.0)
    # midplane points land in the higher-index cell by the containing-cell rule
    assert locate((0.5, 0.5, 0.5), g) == (25, 35, 25)
    assert locate((0.5, 0.8, 0.5), g) == (25, 56, 25)
    assert locate((0.0, 0.0, 0.0), g) == (0, 0, 0)
    assert locate((1.0, 1.0, 1.0), g) == (49, 69, 49)


def test_locate_rejects_outside():
    g = GridSpec(4, 4, 4, 1.0, 1.0, 1.0)
    with pytest.raises(GridError):
        locate((1.1, 0.5, 0.5), g)
    with pytest.raises(GridError):
        locate((0.5, -0.01, 0.5), g)


@given(
    st.integers(1, 20),
    st.floats(0.0, 1.0, allow_nan=False),
)
def test_locate_in_range_property(n, f):
    g = GridSpec(n, n, n, 1.0, 1.0, 1.0)
    c = locate((f, f, f), g)
    assert all(0 <= x < n for x in c)
