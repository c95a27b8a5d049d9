"""Periodic-grid fields and the Fourier-side operators used by the solver.

Coefficients are stored as a half spectrum (n = 0..N/2) normalised so that
the entry at index n is the complex Fourier coefficient of exp(i k_n x):
cos(2 pi x / L) has coefficient 1/2 at n = 1. Negative modes follow from
Hermitian symmetry.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np


MIN_POINTS = 16


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid x_j = j L / N on [0, L)."""

    L: float
    N: int

    def __post_init__(self):
        if not np.isfinite(self.L) or self.L <= 0:
            raise ValueError(f"Domain length must be positive and finite, got L={self.L}.")
        if int(self.N) != self.N or self.N < MIN_POINTS or self.N % 2:
            raise ValueError(f"N must be an even integer >= {MIN_POINTS}, got N={self.N}.")
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "N", int(self.N))

    @property
    def dx(self) -> float:
        return self.L / self.N

    @cached_property
    def x(self) -> np.ndarray:
        return _readonly(np.arange(self.N) * self.dx)

    @cached_property
    def modes(self) -> np.ndarray:
        """Mode indices n = 0..N/2 of the half spectrum."""
        return _readonly(np.arange(self.N // 2 + 1))

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """k_n = 2 pi n / L for n = 0..N/2."""
        return _readonly(2.0 * np.pi * self.modes / self.L)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """True for the modes kept by the 2/3 rule (|n| <= N/3)."""
        return _readonly(3 * self.modes <= self.N)

    @property
    def dealias_cutoff(self) -> int:
        return self.N // 3


@dataclass(frozen=True, eq=False)
class RealField:
    """Samples of a real field u(x_j) on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.grid.N,):
            raise ValueError(f"Expected {self.grid.N} samples, got shape {values.shape}.")
        if not np.all(np.isfinite(values)):
            bad = int(np.count_nonzero(~np.isfinite(values)))
            raise ValueError(f"Field has {bad} non-finite sample(s).")
        object.__setattr__(self, "values", _readonly(values))

    def mean(self) -> float:
        return float(self.values.mean())

    def max_norm(self) -> float:
        return float(np.abs(self.values).max())


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Half-spectrum Fourier coefficients of a real field."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if coeffs.shape != (self.grid.N // 2 + 1,):
            raise ValueError(
                f"Expected {self.grid.N // 2 + 1} coefficients, got shape {coeffs.shape}."
            )
        # Modes 0 and N/2 are their own conjugates.
        coeffs = coeffs.copy()
        coeffs[0] = coeffs[0].real
        coeffs[-1] = coeffs[-1].real
        object.__setattr__(self, "coeffs", _readonly(coeffs))

    @classmethod
    def zeros(cls, grid: Grid) -> "SpectralField":
        return cls(grid, np.zeros(grid.N // 2 + 1, dtype=np.complex128))

    def full_spectrum(self) -> np.ndarray:
        """Coefficients for n = -N/2..N/2-1 in natural order."""
        half = self.grid.N // 2
        negative = np.conj(self.coeffs[1:half][::-1])
        return np.concatenate(([self.coeffs[half]], negative, self.coeffs[:half]))


def to_spectral(f: RealField) -> SpectralField:
    """Forward transform. The mean is kept in mode 0 (not projected)."""
    return SpectralField(f.grid, np.fft.rfft(f.values, norm="forward"))


def to_real(s: SpectralField) -> RealField:
    """Inverse transform back to grid samples."""
    return RealField(s.grid, np.fft.irfft(s.coeffs, n=s.grid.N, norm="forward"))


def project_zero_mean(s: SpectralField) -> SpectralField:
    coeffs = s.coeffs.copy()
    coeffs[0] = 0.0
    return SpectralField(s.grid, coeffs)


def derivative_symbol(grid: Grid, order: int) -> np.ndarray:
    """(i k_n)^order on the half spectrum; odd orders drop the Nyquist mode."""
    if int(order) != order or order < 1:
        raise ValueError(f"Derivative order must be a positive integer, got {order}.")
    symbol = (1j * grid.wavenumbers) ** int(order)
    if order % 2:
        symbol[-1] = 0.0
    return symbol


def derivative(s: SpectralField, order: int) -> SpectralField:
    return SpectralField(s.grid, s.coeffs * derivative_symbol(s.grid, order))


def dealias(s: SpectralField) -> SpectralField:
    return SpectralField(s.grid, np.where(s.grid.dealias_mask, s.coeffs, 0.0))


def gaussian_symbol(grid: Grid, sigma: float) -> np.ndarray:
    """Fourier transform of the normalised Gaussian of standard deviation sigma."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}.")
    return np.exp(-0.5 * sigma**2 * grid.wavenumbers**2)


def gaussian_multiplier(s: SpectralField, sigma: float) -> SpectralField:
    """Periodic convolution with a normalised Gaussian, done as a multiplier."""
    return SpectralField(s.grid, s.coeffs * gaussian_symbol(s.grid, sigma))
