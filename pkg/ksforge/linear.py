"""Closed-form results of the linearised equation u_t = -u_xx - u_xxxx."""
from dataclasses import dataclass

import numpy as np

from ksforge.dynamics import SolverParams, ks_step, whole_steps
from ksforge.spectral import Grid, SpectralField


CONTINUUM_K = 1.0 / np.sqrt(2.0)
CONTINUUM_WAVELENGTH = 2.0**1.5 * np.pi


@dataclass(frozen=True)
class ModeInfo:
    n: int
    k: float
    rate: float

    @classmethod
    def of(cls, grid: Grid, n: int) -> "ModeInfo":
        k = 2.0 * np.pi * n / grid.L
        return cls(int(n), k, growth_rate(k))


@dataclass(frozen=True)
class FastestMode:
    """The fastest discrete mode together with the continuum maximiser."""

    mode: ModeInfo
    k_star: float = CONTINUUM_K
    rate_star: float = 0.25
    wavelength: float = CONTINUUM_WAVELENGTH
    inverse_wavelength: float = 1.0 / CONTINUUM_WAVELENGTH


def growth_rate(k):
    """k^2 - k^4, the exponential rate of a mode of wavenumber k."""
    return k**2 - k**4


def _positive_modes(grid: Grid):
    return [ModeInfo.of(grid, n) for n in range(1, grid.N // 2)]


def unstable_modes(grid: Grid):
    """Every mode n != 0 with k_n^2 - k_n^4 > 0, fastest first.

    Marginal modes (rate exactly zero) are left out. Equal rates are ordered
    by |n|, and +n before -n.
    """
    growing = [mode for mode in _positive_modes(grid) if mode.rate > 0]
    both = growing + [ModeInfo(-m.n, -m.k, m.rate) for m in growing]
    return sorted(both, key=lambda m: (-m.rate, abs(m.n), -m.n))


def fastest_mode(grid: Grid) -> FastestMode:
    modes = _positive_modes(grid)
    # max keeps the first of equal rates, i.e. the smallest n.
    best = max(modes, key=lambda m: m.rate)
    return FastestMode(best)


def measure_growth_rate(params: SolverParams, n: int, t_span: float, amplitude: float = 1e-8) -> float:
    """Exponential rate of mode n seeded alone at tiny amplitude in the full solver."""
    grid = params.grid
    if not 0 < n <= grid.dealias_cutoff:
        raise ValueError(f"Mode {n} is outside the resolved band 1..{grid.dealias_cutoff}.")
    steps = whole_steps(t_span, params.dt, "t_span")
    if steps < 1:
        raise ValueError(f"t_span={t_span} is shorter than one step of dt={params.dt}.")
    coeffs = np.zeros(grid.N // 2 + 1, dtype=np.complex128)
    coeffs[n] = amplitude
    state = SpectralField(grid, coeffs)
    for step in range(1, steps + 1):
        state = ks_step(state, params, step)
    return float(np.log(abs(state.coeffs[n]) / amplitude) / (steps * params.dt))
