"""The command implementations behind the ksforge CLI.

Each cmd_* function takes a RunConfig, writes its outputs under
config.out_dir and returns what it computed.
"""
from dataclasses import dataclass
from multiprocessing import Pool
from pathlib import Path

import numpy as np
import pandas as pd
from jinja2 import Template

from ksforge.chaos import LyapunovEstimate, lyapunov1
from ksforge.colors import print_error, print_info, print_success, print_warning
from ksforge.config import RunConfig, get_templates_path
from ksforge.dynamics import SolverParams, Trajectory, evolve, random_initial, zero_initial
from ksforge.linear import fastest_mode, growth_rate, measure_growth_rate, unstable_modes
from ksforge.render import HeatmapSpec, heatmap, mask_image, overlay, save_png, write_pbm, write_ppm
from ksforge.storage import read_trajectory, trajectory_frame, write_table, write_trajectory
from ksforge.stripes import (
    DensityReport,
    StripeTracking,
    density,
    density_of_slices,
    stripe_mask,
    track,
)


TRAJECTORY_FILE = "trajectory.kstraj"


@dataclass(frozen=True, eq=False)
class SimulationResult:
    trajectory: Trajectory
    trajectory_path: Path
    image_path: Path


@dataclass(frozen=True, eq=False)
class StripesResult:
    tracking: StripeTracking
    report: DensityReport
    violations: list
    events_path: Path
    density_path: Path
    overlay_path: Path


@dataclass(frozen=True, eq=False)
class SweepResult:
    runs: pd.DataFrame
    summary: pd.DataFrame
    failures: list


# -------------------- Helpers -------------------- #
def heatmap_spec(config: RunConfig) -> HeatmapSpec:
    return HeatmapSpec(width=config.image_width, height=config.image_height, overlay=config.overlay)


def initial_field(config: RunConfig):
    grid = config.grid()
    if config.initial == "zero":
        return zero_initial(grid)
    return random_initial(grid, config.seed)


def stripe_options(config: RunConfig) -> dict:
    return {
        "sigma": config.sigma,
        "t_transient": config.t_transient,
        "threshold": config.stripe_threshold,
        "min_width": config.min_stripe_width,
        "smooth": config.smooth_slope,
    }


def events_frame(tracking: StripeTracking) -> pd.DataFrame:
    """One row per event; participants written as start:end arc bounds."""
    by_time = {s.t: s for s in tracking.slices}
    rows = []
    for event in tracking.log.events:
        before = by_time[event.t_before].arcs
        after = by_time[event.t_after].arcs
        rows.append({
            "t_before": event.t_before,
            "t_after": event.t_after,
            "kind": event.kind,
            "before": ";".join(before[i].bounds() for i in event.before),
            "after": ";".join(after[j].bounds() for j in event.after),
        })
    return pd.DataFrame(rows, columns=["t_before", "t_after", "kind", "before", "after"])


def density_frame(report: DensityReport, seed: int) -> pd.DataFrame:
    return pd.DataFrame([{
        "L": report.L,
        "seed": seed,
        "t_transient": report.t_transient,
        "n_slices": int(report.counts.size),
        "mean_count": report.mean_count,
        "density": report.density,
    }])


def _out_dir(config: RunConfig) -> Path:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _save_image(rgb, path: Path, config: RunConfig) -> Path:
    write_ppm(path, rgb, config.yaml_lines())
    if config.png:
        save_png(path.with_suffix(".png"), rgb, config.yaml_lines())
    return path


# -------------------- Command Implementations -------------------- #
def cmd_simulate(config: RunConfig) -> SimulationResult:
    """Integrate from seeded initial data, store the trajectory and its heatmap."""
    out = _out_dir(config)
    params = config.solver_params()
    print_info(
        f"Simulating L={config.L:.6g}, N={params.grid.N}, dt={config.dt}, "
        f"t_end={config.t_end}, seed={config.seed}..."
    )
    trajectory = evolve(initial_field(config), params)

    trajectory_path = write_trajectory(out / TRAJECTORY_FILE, trajectory, config)
    image_path = _save_image(heatmap(trajectory.values, heatmap_spec(config)), out / "heatmap.ppm", config)
    if config.export_csv:
        write_table(trajectory_frame(trajectory), out / "trajectory.csv", config)

    settled = trajectory.times >= config.t_transient
    if settled.any():
        print_info(f"max |u| for t >= {config.t_transient}: {trajectory.max_norms()[settled].max():.4f}")
    print_info(f"max |mean(u)| over snapshots: {np.abs(trajectory.means()).max():.3e}")
    print_success(f"Trajectory written to '{trajectory_path}', heatmap to '{image_path}'.")
    return SimulationResult(trajectory, trajectory_path, image_path)


def write_conjecture_report(path: Path, config: RunConfig, violations) -> Path:
    template = Template(get_templates_path().joinpath("conjecture_report.md.template").read_text())
    path.write_text(template.render(
        L=config.L,
        seed=config.seed,
        t_transient=config.t_transient,
        events=violations,
        config_lines=config.yaml_lines(),
    ))
    return path


def cmd_stripes(config: RunConfig, trajectory_path=None) -> StripesResult:
    """Extract, track and count stripes of a stored trajectory."""
    out = _out_dir(config)
    stored = read_trajectory(trajectory_path or out / TRAJECTORY_FILE)
    trajectory = stored.trajectory
    options = stripe_options(config)

    print_info(f"Tracking stripes over {len(trajectory)} snapshots (sigma={config.sigma})...")
    tracking = track(trajectory, **options)
    report = density_of_slices(tracking.slices, trajectory.grid.L, config.t_transient)

    events_path = write_table(events_frame(tracking), out / "events.csv", stored.config)
    density_path = write_table(density_frame(report, stored.seed), out / "density.csv", stored.config)
    write_table(
        pd.DataFrame({"t": report.times, "count": report.counts}),
        out / "stripe_counts.csv",
        stored.config,
    )

    spec = heatmap_spec(config)
    mask = stripe_mask(tracking.slices)
    rgb = heatmap(trajectory.values, spec)
    if spec.overlay:
        rgb = overlay(rgb, mask, spec)
    overlay_path = _save_image(rgb, out / "stripes.ppm", stored.config)
    write_pbm(out / "stripes.pbm", mask_image(mask, spec), stored.config.yaml_lines())

    summary = tracking.summary()
    for phase, counts in summary.items():
        print_info(f"{phase}: " + ", ".join(f"{kind}={n}" for kind, n in counts.items()))
    print_info(f"Stripe density {report.density:.4f} ({report.mean_count:.2f} stripes on L={report.L:.6g}).")

    violations = tracking.log.violations(config.t_transient)
    if violations:
        report_path = write_conjecture_report(out / "conjecture_report.md", stored.config, violations)
        print_warning(
            f"{len(violations)} death/split event(s) after t={config.t_transient}; "
            f"details in '{report_path}'."
        )
    print_success(f"Stripe outputs written to '{out}'.")
    return StripesResult(tracking, report, violations, events_path, density_path, overlay_path)


def cmd_linear_check(config: RunConfig) -> pd.DataFrame:
    """Measured small-amplitude growth rates against k^2 - k^4."""
    grid = config.grid()
    params = SolverParams(grid, config.dt, config.linear_t_span, save_stride=1)
    growing = [m.n for m in unstable_modes(grid) if m.n > 0]
    n_max = min(max(growing, default=0) + 1, grid.dealias_cutoff)

    rows = []
    for n in range(1, n_max + 1):
        k = 2.0 * np.pi * n / grid.L
        theory = growth_rate(k)
        measured = measure_growth_rate(params, n, config.linear_t_span)
        difference = abs(measured - theory)
        rows.append({
            "n": n,
            "k": k,
            "theory": theory,
            "measured": measured,
            "error": difference / abs(theory) if abs(theory) > 1e-12 else difference,
        })
    frame = pd.DataFrame(rows, columns=["n", "k", "theory", "measured", "error"])
    path = write_table(frame, _out_dir(config) / "linear_check.csv", config)
    print_success(f"Checked {len(frame)} mode(s); largest error {frame['error'].max():.3e}. Table in '{path}'.")
    return frame


def _sweep_job(config: RunConfig) -> dict:
    """One (L, seed) run of the density sweep; failures are returned, not raised."""
    row = {"L": config.L, "seed": config.seed}
    try:
        trajectory = evolve(initial_field(config), config.solver_params())
        report = density(trajectory, **stripe_options(config))
        write_table(density_frame(report, config.seed), Path(config.out_dir) / "density.csv", config)
        row.update(mean_count=report.mean_count, density=report.density, error="")
    except Exception as e:
        row.update(mean_count=np.nan, density=np.nan, error=f"{type(e).__name__}: {e}")
    return row


def sweep_configs(config: RunConfig):
    sweep_root = Path(config.out_dir) / "sweep"
    return [
        config.replace(
            L=L,
            N=0,
            seed=seed,
            out_dir=str(sweep_root / f"L{L:.6f}_seed{seed}"),
        )
        for L in config.sweep_L
        for seed in config.sweep_seeds
    ]


def cmd_density_sweep(config: RunConfig) -> SweepResult:
    """Stripe density for every (L, seed) pair, run up to config.jobs at a time."""
    configs = sweep_configs(config)
    print_info(f"Running {len(configs)} sweep job(s) with {config.jobs} worker(s)...")
    if config.jobs > 1:
        with Pool(processes=config.jobs) as pool:
            rows = pool.map(_sweep_job, configs)
    else:
        rows = [_sweep_job(c) for c in configs]

    runs = pd.DataFrame(rows, columns=["L", "seed", "mean_count", "density", "error"])
    failures = [row for row in rows if row["error"]]
    for row in failures:
        print_error(f"Sweep run L={row['L']:.6g}, seed={row['seed']} failed: {row['error']}")

    ok = runs[runs["error"] == ""]
    summary = (
        ok.groupby("L", sort=True)["density"]
        .agg(["mean", "std", "count"])
        .rename(columns={"mean": "density_mean", "std": "density_std", "count": "runs"})
        .fillna({"density_std": 0.0})
        .reset_index()
    )
    out = _out_dir(config)
    write_table(runs, out / "sweep_runs.csv", config)
    path = write_table(summary, out / "density_sweep.csv", config)
    if failures:
        print_warning(f"{len(failures)} of {len(rows)} sweep run(s) failed.")
    print_success(f"Density sweep written to '{path}'.")
    return SweepResult(runs, summary, failures)


def cmd_lyapunov(config: RunConfig) -> LyapunovEstimate:
    """Leading Lyapunov exponent from seeded initial data."""
    print_info(
        f"Estimating lambda1 at L={config.L:.6g}: transient {config.t_transient}, "
        f"window {config.lyapunov_window}, renormalising every {config.renorm_interval}..."
    )
    estimate = lyapunov1(
        initial_field(config),
        config.solver_params(),
        delta0=config.delta0,
        renorm_interval=config.renorm_interval,
        t_transient=config.t_transient,
        window=config.lyapunov_window,
        seed=config.seed,
    )
    frame = pd.DataFrame({
        "interval": np.arange(1, estimate.n_renorms + 1),
        "t": estimate.times,
        "log_growth": estimate.log_growth,
        "rate": estimate.log_growth / estimate.renorm_interval,
    })
    path = write_table(frame, _out_dir(config) / "lyapunov.csv", config)
    print_success(
        f"lambda1 = {estimate.lambda1:.5f} +/- {estimate.stderr:.5f} "
        f"over {estimate.n_renorms} renormalisations. Series in '{path}'."
    )
    return estimate


def cmd_modes(config: RunConfig) -> pd.DataFrame:
    """Unstable modes of the linearised equation as a CSV table on stdout."""
    grid = config.grid()
    frame = pd.DataFrame(
        [{"n": m.n, "k": m.k, "rate": m.rate} for m in unstable_modes(grid)],
        columns=["n", "k", "rate"],
    )
    fastest = fastest_mode(grid)
    print(f"# fastest discrete mode: n={fastest.mode.n}, k={fastest.mode.k:.6f}, rate={fastest.mode.rate:.6f}")
    print(f"# continuum: k*={fastest.k_star:.6f}, wavelength={fastest.wavelength:.6f}, "
          f"inverse wavelength={fastest.inverse_wavelength:.6f}")
    print(frame.to_csv(index=False, lineterminator="\n"), end="")
    return frame
