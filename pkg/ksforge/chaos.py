"""Leading Lyapunov exponent by two-trajectory renormalisation.

A fiducial and a perturbed solution advance in lockstep. Every
renorm_interval the separation is measured in the discrete L2 norm, its log
growth recorded, and the perturbation rescaled back to delta0 along the
current difference.
"""
from dataclasses import dataclass

import numpy as np

from ksforge.dynamics import SolverParams, advance, whole_steps
from ksforge.spectral import RealField, to_spectral


# Beyond this growth in one interval the difference is no longer infinitesimal.
MAX_INTERVAL_GROWTH = 1e12


class SeparationRangeError(RuntimeError):
    """The separation underflowed or overflowed between renormalisations."""


@dataclass(frozen=True, eq=False)
class LyapunovEstimate:
    lambda1: float
    stderr: float
    renorm_interval: float
    n_renorms: int
    times: np.ndarray
    log_growth: np.ndarray


@dataclass(frozen=True, eq=False)
class SeparationCurve:
    times: np.ndarray
    log_norms: np.ndarray

    def slope(self) -> float:
        """Least-squares growth rate of log ||delta(t)||."""
        if self.times.size < 2:
            raise ValueError("Need at least two points to fit a growth rate.")
        return float(np.polyfit(self.times, self.log_norms, 1)[0])


def l2_norm(coeffs, grid) -> float:
    u = np.fft.irfft(coeffs, n=grid.N, norm="forward")
    return float(np.sqrt(grid.dx * np.sum(u * u)))


def _perturbation(params: SolverParams, delta0: float, seed: int):
    """Random zero-mean, dealiased direction of L2 size delta0."""
    grid = params.grid
    rng = np.random.default_rng([seed, 1])
    coeffs = to_spectral(RealField(grid, rng.standard_normal(grid.N))).coeffs.copy()
    coeffs[0] = 0.0
    coeffs[~grid.dealias_mask] = 0.0
    return coeffs * (delta0 / l2_norm(coeffs, grid))


def _start(initial: RealField, params: SolverParams, t_transient: float):
    if initial.grid != params.grid:
        raise ValueError("Initial field and solver parameters live on different grids.")
    state = to_spectral(initial).coeffs.copy()
    if params.project_mean:
        state[0] = 0.0
    for step in range(1, whole_steps(t_transient, params.dt, "t_transient") + 1):
        state = advance(state, params, step)
    return state


def lyapunov1(initial: RealField, params: SolverParams, delta0: float = 1e-7,
              renorm_interval: float = 1.0, t_transient: float = 50.0,
              window: float = 500.0, seed: int = 0) -> LyapunovEstimate:
    """Time-averaged log growth rate of infinitesimal separations."""
    if not delta0 > 0:
        raise ValueError(f"delta0 must be positive, got {delta0}.")
    grid = params.grid
    per_interval = whole_steps(renorm_interval, params.dt, "renorm_interval")
    n_renorms = int(round(window / renorm_interval))
    if per_interval < 1 or n_renorms < 1:
        raise ValueError("The accumulation window must hold at least one renormalisation step.")

    fiducial = _start(initial, params, t_transient)
    perturbed = fiducial + _perturbation(params, delta0, seed)

    log_growth = np.empty(n_renorms)
    for interval in range(n_renorms):
        for _ in range(per_interval):
            fiducial = advance(fiducial, params)
            perturbed = advance(perturbed, params)
        distance = l2_norm(perturbed - fiducial, grid)
        ratio = distance / delta0
        if not np.isfinite(ratio) or ratio == 0 or ratio > MAX_INTERVAL_GROWTH:
            raise SeparationRangeError(
                f"Separation {distance:.3e} after interval {interval} is outside the "
                f"rescaling range (delta0={delta0:.1e})."
            )
        log_growth[interval] = np.log(ratio)
        perturbed = fiducial + (perturbed - fiducial) / ratio

    rates = log_growth / renorm_interval
    stderr = float(rates.std(ddof=1) / np.sqrt(n_renorms)) if n_renorms > 1 else float("nan")
    times = t_transient + renorm_interval * np.arange(1, n_renorms + 1)
    return LyapunovEstimate(
        lambda1=float(log_growth.sum() / (n_renorms * renorm_interval)),
        stderr=stderr,
        renorm_interval=float(renorm_interval),
        n_renorms=n_renorms,
        times=times,
        log_growth=log_growth,
    )


def separation_curve(initial: RealField, params: SolverParams, delta0: float,
                     t_transient: float = 0.0, seed: int = 0) -> SeparationCurve:
    """log ||delta(t)|| without renormalisation, until ||delta|| > 1 or params.t_end.

    Samples are taken every params.save_stride steps.
    """
    if delta0 == 0:
        raise ValueError("delta0 = 0 gives an identically -inf separation.")
    if delta0 < 0:
        raise ValueError(f"delta0 must be positive, got {delta0}.")
    grid = params.grid
    fiducial = _start(initial, params, t_transient)
    perturbed = fiducial + _perturbation(params, delta0, seed)

    times = [0.0]
    log_norms = [np.log(delta0)]
    for step in range(1, params.n_steps + 1):
        fiducial = advance(fiducial, params, step)
        perturbed = advance(perturbed, params, step)
        if step % params.save_stride:
            continue
        distance = l2_norm(perturbed - fiducial, grid)
        if distance == 0:
            break
        times.append(step * params.dt)
        log_norms.append(np.log(distance))
        if distance > 1.0:
            break
    return SeparationCurve(np.array(times), np.array(log_norms))
