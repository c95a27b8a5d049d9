"""Time integration of u_t = -u_xx - u_xxxx - u u_x and the Galilei group actions.

The stiff linear part k^2 - k^4 is integrated exactly by fourth-order
exponential time differencing (ETDRK4). The phi-function coefficients are
averaged over points of a small contour around each linear eigenvalue so
they stay accurate where dt*(k^2 - k^4) is close to zero.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ksforge.colors import print_warning
from ksforge.spectral import (
    Grid,
    RealField,
    SpectralField,
    to_real,
    to_spectral,
)


MAX_DT = 0.5
BLOWUP_THRESHOLD = 1e8
CONTOUR_POINTS = 32
# Largest exponent exp() can take without overflowing float64.
LOG_FLOAT_MAX = np.log(np.finfo(np.float64).max)


class BlowUpError(RuntimeError):
    """A spectral coefficient left the bounded attractor by a wide margin."""

    def __init__(self, step, mode, magnitude):
        self.step = step
        self.mode = mode
        self.magnitude = magnitude
        where = f"at step {step}" if step is not None else "during a step"
        super().__init__(
            f"Solution blew up {where}: |u_{mode}| = {magnitude:.3e} "
            f"(threshold {BLOWUP_THRESHOLD:.0e})."
        )


def whole_steps(duration, dt, what) -> int:
    """Number of steps of dt in duration, which must be a whole number."""
    steps = duration / dt
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
        raise ValueError(f"{what}={duration} is not a whole number of steps of dt={dt}.")
    return int(round(steps))


@dataclass(frozen=True)
class SolverParams:
    grid: Grid
    dt: float
    t_end: float
    save_stride: int = 1
    project_mean: bool = True

    def __post_init__(self):
        if not 0 < self.dt <= MAX_DT:
            raise ValueError(f"dt must lie in (0, {MAX_DT}], got {self.dt}.")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}.")
        if int(self.save_stride) != self.save_stride or self.save_stride < 1:
            raise ValueError(f"save_stride must be a positive integer, got {self.save_stride}.")
        steps = whole_steps(self.t_end, self.dt, "t_end")
        if steps % self.save_stride:
            raise ValueError(
                f"{steps} steps are not a multiple of save_stride={self.save_stride}."
            )

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def save_interval(self) -> float:
        return self.dt * self.save_stride


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Snapshots u(t_i, x_j) stored row by row."""

    grid: Grid
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if times.ndim != 1 or values.shape != (times.size, self.grid.N):
            raise ValueError(
                f"Snapshot array of shape {values.shape} does not match "
                f"{times.size} times on {self.grid.N} points."
            )
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ValueError("Trajectory times must be strictly increasing.")
        for name, array in (("times", times), ("values", values)):
            array = array.copy()
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    def __len__(self):
        return self.times.size

    def snapshot(self, index: int) -> RealField:
        return RealField(self.grid, self.values[index])

    @property
    def snapshots(self):
        return [self.snapshot(i) for i in range(len(self))]

    def max_norms(self) -> np.ndarray:
        return np.abs(self.values).max(axis=1)

    def means(self) -> np.ndarray:
        return self.values.mean(axis=1)


# -------------------- ETDRK4 -------------------- #
def linear_symbol(grid: Grid) -> np.ndarray:
    """Growth rate k_n^2 - k_n^4 of each half-spectrum mode."""
    k = grid.wavenumbers
    return k**2 - k**4


@lru_cache(maxsize=64)
def _etd_coefficients(grid: Grid, dt: float):
    lin = dt * linear_symbol(grid)
    roots = np.exp(1j * np.pi * (np.arange(1, CONTOUR_POINTS + 1) - 0.5) / CONTOUR_POINTS)
    lr = lin[:, None] + roots[None, :]
    exp_lr = np.exp(lr)
    lr3 = lr**3
    q = dt * np.mean((np.exp(lr / 2) - 1) / lr, axis=1).real
    f1 = dt * np.mean((-4 - lr + exp_lr * (4 - 3 * lr + lr**2)) / lr3, axis=1).real
    f2 = dt * np.mean((2 + lr + exp_lr * (lr - 2)) / lr3, axis=1).real
    f3 = dt * np.mean((-4 - 3 * lr - lr**2 + exp_lr * (4 - lr)) / lr3, axis=1).real
    gradient = -0.5j * grid.wavenumbers
    gradient[-1] = 0.0
    coefficients = (np.exp(lin), np.exp(lin / 2), q, f1, f2, f3, gradient)
    for array in coefficients:
        array.setflags(write=False)
    return coefficients


def _nonlinear(coeffs, grid, gradient):
    """-(1/2) d/dx (u^2), evaluated on the grid and truncated by the 2/3 rule."""
    u = np.fft.irfft(coeffs, n=grid.N, norm="forward")
    return np.where(grid.dealias_mask, gradient * np.fft.rfft(u * u, norm="forward"), 0.0)


def _check_bounded(coeffs, step):
    magnitude = np.abs(coeffs)
    magnitude = np.where(np.isfinite(magnitude), magnitude, np.inf)
    mode = int(np.argmax(magnitude))
    if magnitude[mode] > BLOWUP_THRESHOLD:
        raise BlowUpError(step, mode, float(magnitude[mode]))


def advance(coeffs, params: SolverParams, step=None):
    """One ETDRK4 step on a raw half-spectrum array; returns a new array."""
    grid = params.grid
    e, e2, q, f1, f2, f3, gradient = _etd_coefficients(grid, params.dt)
    n_v = _nonlinear(coeffs, grid, gradient)
    a = e2 * coeffs + q * n_v
    n_a = _nonlinear(a, grid, gradient)
    b = e2 * coeffs + q * n_a
    n_b = _nonlinear(b, grid, gradient)
    c = e2 * a + q * (2 * n_b - n_v)
    n_c = _nonlinear(c, grid, gradient)
    new = e * coeffs + f1 * n_v + 2 * f2 * (n_a + n_b) + f3 * n_c
    new = np.where(grid.dealias_mask, new, 0.0)
    if params.project_mean:
        new[0] = 0.0
    _check_bounded(new, step)
    return new


def ks_step(state: SpectralField, params: SolverParams, step=None) -> SpectralField:
    """Advance one ETDRK4 step of length params.dt."""
    if state.grid != params.grid:
        raise ValueError("State and solver parameters live on different grids.")
    return SpectralField(state.grid, advance(state.coeffs, params, step))


def evolve(initial: RealField, params: SolverParams) -> Trajectory:
    """Integrate from t=0 to params.t_end, keeping every save_stride-th state."""
    if initial.grid != params.grid:
        raise ValueError("Initial field and solver parameters live on different grids.")
    grid = params.grid
    coeffs = to_spectral(initial).coeffs.copy()
    if params.project_mean:
        coeffs[0] = 0.0

    n_saves = params.n_steps // params.save_stride + 1
    values = np.empty((n_saves, grid.N))
    values[0] = np.fft.irfft(coeffs, n=grid.N, norm="forward")
    for step in range(1, params.n_steps + 1):
        coeffs = advance(coeffs, params, step)
        if step % params.save_stride == 0:
            values[step // params.save_stride] = np.fft.irfft(coeffs, n=grid.N, norm="forward")

    times = np.arange(n_saves) * params.save_interval
    return Trajectory(grid, times, values)


def linear_evolve_exact(initial: SpectralField, t: float) -> SpectralField:
    """Exact solution of the linearised equation: u_n(t) = exp((k_n^2 - k_n^4) t) u_n(0)."""
    exponent = linear_symbol(initial.grid) * t
    active = initial.coeffs != 0
    if np.any(exponent[active] > LOG_FLOAT_MAX):
        raise OverflowError(
            f"Linear propagator overflows at t={t}: largest exponent "
            f"{exponent[active].max():.1f} exceeds {LOG_FLOAT_MAX:.1f}."
        )
    if t < 0:
        print_warning(f"Backward linear evolution to t={t} amplifies high modes.")
    return SpectralField(initial.grid, initial.coeffs * np.exp(np.where(active, exponent, 0.0)))


# -------------------- Galilei group -------------------- #
def translate(f: RealField, a: float) -> RealField:
    """u(x - a) by a spectral phase shift; exact for band-limited fields."""
    grid = f.grid
    phase = np.exp(-1j * grid.wavenumbers * a)
    # The Nyquist mode of a real field can only be scaled, not rotated.
    phase[-1] = np.cos(grid.wavenumbers[-1] * a)
    return to_real(SpectralField(grid, to_spectral(f).coeffs * phase))


def boost(f: RealField, v: float, t: float) -> RealField:
    """u(x - t v) + v. The result has mean mean(f) + v."""
    shifted = translate(f, t * v)
    return RealField(f.grid, shifted.values + v)


def reflect(f: RealField) -> RealField:
    """-u(-x), with -x taken modulo L."""
    return RealField(f.grid, -np.roll(f.values[::-1], 1))


# -------------------- Initial data -------------------- #
def random_initial(grid: Grid, seed: int) -> RealField:
    """Independent uniform samples on [-1, 1], one per grid point."""
    rng = np.random.default_rng(seed)
    return RealField(grid, rng.uniform(-1.0, 1.0, grid.N))


def zero_initial(grid: Grid) -> RealField:
    return RealField(grid, np.zeros(grid.N))
