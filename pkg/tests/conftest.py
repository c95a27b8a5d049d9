"""Shared fixtures for the ksforge test-suite."""
import math

import numpy as np
import pytest

from ksforge.dynamics import SolverParams, evolve, random_initial
from ksforge.spectral import Grid, SpectralField, to_real


REFERENCE_L = 32 * math.pi
REFERENCE_SEED = 2021


@pytest.fixture(autouse=True)
def isolated_home(tmp_path, monkeypatch):
    """Keep ~/.config/ksforge of the machine running the tests out of every test."""
    home = tmp_path / "home"
    home.mkdir()
    monkeypatch.setenv("HOME", str(home))
    monkeypatch.setenv("NO_COLOR", "1")
    return home


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid64():
    return Grid(REFERENCE_L, 64)


@pytest.fixture
def grid256():
    return Grid(REFERENCE_L, 256)


def band_limited(grid, rng, n_max=10, scale=1.0):
    """Real field with random Fourier coefficients on modes 1..n_max only."""
    coeffs = np.zeros(grid.N // 2 + 1, dtype=np.complex128)
    coeffs[1:n_max + 1] = scale * (rng.standard_normal(n_max) + 1j * rng.standard_normal(n_max))
    return to_real(SpectralField(grid, coeffs))


def wrapped_gaussian(distance, sigma, L, wraps=3):
    """Periodic sum of the normalised Gaussian kernel."""
    shifts = np.arange(-wraps, wraps + 1) * L
    d = np.asarray(distance)[..., None] + shifts
    return np.exp(-0.5 * (d / sigma) ** 2).sum(axis=-1) / (sigma * math.sqrt(2 * math.pi))


def convolve_directly(grid, values, sigma):
    """Brute-force periodic convolution with the wrapped Gaussian on the grid."""
    x = grid.x
    kernel = wrapped_gaussian(x[:, None] - x[None, :], sigma, grid.L)
    return grid.dx * kernel @ values


@pytest.fixture(scope="session")
def reference_trajectory():
    """L = 32 pi, N = 256, dt = 0.05 up to t = 200, saved every 0.25."""
    grid = Grid(REFERENCE_L, 256)
    params = SolverParams(grid, dt=0.05, t_end=200.0, save_stride=5)
    return evolve(random_initial(grid, REFERENCE_SEED), params)
