"""Trajectory files and CSV tables.

A trajectory file is a fixed little-endian header, the YAML text of the run
config, then the snapshots as row-major float64. Every CSV starts with the
run config as `# key: value` comment lines.
"""
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
import yaml

from ksforge.config import RunConfig, render_config
from ksforge.dynamics import Trajectory
from ksforge.spectral import Grid


MAGIC = b"KSTRAJ\x00\x00"
FORMAT_VERSION = 1
HEADER_DTYPE = np.dtype([
    ("magic", "S8"),
    ("version", "<u4"),
    ("n_points", "<u4"),
    ("L", "<f8"),
    ("dt", "<f8"),
    ("save_stride", "<u4"),
    ("n_snapshots", "<u4"),
    ("seed", "<u8"),
    ("t0", "<f8"),
    ("config_bytes", "<u4"),
])


class TrajectoryFormatError(ValueError):
    """The file is not a trajectory this version can read."""


@dataclass(frozen=True, eq=False)
class StoredTrajectory:
    trajectory: Trajectory
    config: RunConfig
    dt: float
    save_stride: int
    seed: int


def write_trajectory(path, trajectory: Trajectory, config: RunConfig) -> Path:
    path = Path(path)
    if trajectory.grid.N != config.points or trajectory.grid.L != config.L:
        raise ValueError("Trajectory grid does not match the run config.")
    config_text = render_config(config).encode("utf-8")
    header = np.zeros((), dtype=HEADER_DTYPE)
    header["magic"] = MAGIC
    header["version"] = FORMAT_VERSION
    header["n_points"] = trajectory.grid.N
    header["L"] = trajectory.grid.L
    header["dt"] = config.dt
    header["save_stride"] = config.save_stride
    header["n_snapshots"] = len(trajectory)
    header["seed"] = config.seed
    header["t0"] = trajectory.times[0] if len(trajectory) else 0.0
    header["config_bytes"] = len(config_text)

    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(header.tobytes())
        f.write(config_text)
        f.write(np.ascontiguousarray(trajectory.values, dtype="<f8").tobytes())
    return path


def read_trajectory(path) -> StoredTrajectory:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Trajectory file '{path}' not found.")
    data = path.read_bytes()
    if len(data) < HEADER_DTYPE.itemsize:
        raise TrajectoryFormatError(f"'{path}' is too short to hold a trajectory header.")
    header = np.frombuffer(data, dtype=HEADER_DTYPE, count=1)[0]
    if bytes(header["magic"]).ljust(8, b"\x00") != MAGIC:
        raise TrajectoryFormatError(f"'{path}' is not a ksforge trajectory file.")
    if int(header["version"]) != FORMAT_VERSION:
        raise TrajectoryFormatError(
            f"'{path}' has format version {int(header['version'])}; "
            f"this build reads version {FORMAT_VERSION}."
        )

    offset = HEADER_DTYPE.itemsize
    config_end = offset + int(header["config_bytes"])
    config = RunConfig.from_mapping(yaml.safe_load(data[offset:config_end].decode("utf-8")))

    n_snapshots, n_points = int(header["n_snapshots"]), int(header["n_points"])
    expected = config_end + 8 * n_snapshots * n_points
    if len(data) != expected:
        raise TrajectoryFormatError(f"'{path}' holds {len(data)} bytes, expected {expected}.")
    values = np.frombuffer(data, dtype="<f8", offset=config_end).reshape(n_snapshots, n_points)

    dt, save_stride = float(header["dt"]), int(header["save_stride"])
    times = float(header["t0"]) + np.arange(n_snapshots) * (dt * save_stride)
    grid = Grid(float(header["L"]), n_points)
    return StoredTrajectory(
        trajectory=Trajectory(grid, times, values),
        config=config,
        dt=dt,
        save_stride=save_stride,
        seed=int(header["seed"]),
    )


def write_table(frame: pd.DataFrame, path, config: RunConfig) -> Path:
    """Write a CSV with a header row, preceded by the config as comments."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        for line in config.yaml_lines():
            f.write(f"# {line}\n")
        frame.to_csv(f, index=False, lineterminator="\n")
    return path


def read_table(path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def trajectory_frame(trajectory: Trajectory) -> pd.DataFrame:
    """Long (t, x, u) table of every sample."""
    n_points = trajectory.grid.N
    return pd.DataFrame({
        "t": np.repeat(trajectory.times, n_points),
        "x": np.tile(trajectory.grid.x, len(trajectory)),
        "u": trajectory.values.reshape(-1),
    })
