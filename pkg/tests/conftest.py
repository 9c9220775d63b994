import numpy as np
import pytest

from mhdlab.fields import Grid, ScalarField, VectorField


def random_scalar(grid: Grid, rng, kmax: int | None = None, mean_zero: bool = True) -> ScalarField:
    """Band-limited random field with |k_int| <= kmax (default: half the 2/3 cutoff)."""
    if kmax is None:
        kmax = max(2, grid.n // 6)
    spec = grid.fft(rng.standard_normal(grid.shape))
    for k in grid._k_int:
        spec = np.where(np.abs(k) <= kmax, spec, 0.0)
    if mean_zero:
        spec[(0,) * grid.dim] = 0.0
    f = ScalarField.from_spectrum(grid, spec)
    top = float(np.max(np.abs(f.values)))
    return ScalarField(grid, f.values / top) if top > 0 else f


def random_vector(grid: Grid, rng, kmax: int | None = None) -> VectorField:
    return VectorField(
        grid, tuple(random_scalar(grid, rng, kmax) for _ in range(grid.dim))
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid2d():
    return Grid(2, 64, 2.0 * np.pi)


@pytest.fixture
def grid3d():
    return Grid(3, 16, 2.0 * np.pi)
