import numpy as np
import pytest

from darcysa import AnnealConfig, BoundaryConditions, GridSpec, ScalarField


@pytest.fixture
def unit_bc():
    return BoundaryConditions(1.0, 0.0)


@pytest.fixture
def tiny_grid():
    """The 1x2x1 series-resistance fixture: two unit cells stacked along y."""
    return GridSpec(1, 2, 1, 1.0, 2.0, 1.0)


@pytest.fixture
def tiny_k(tiny_grid):
    return ScalarField(tiny_grid, np.ones(tiny_grid.shape))


@pytest.fixture
def desk_grid():
    return GridSpec(12, 17, 12, 40.0, 85.0, 25.0)


@pytest.fixture
def desk_anneal():
    return AnnealConfig(m=100, n_s=60, alpha=0.85)


def random_lognormal_k(grid, seed, sigma=1.0):
    rng = np.random.default_rng(seed)
    return ScalarField(grid, np.exp(sigma * rng.standard_normal(grid.shape)))
