import dataclasses
import math
import os
import re
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path

import yaml
from jinja2 import Template

from ksforge.colors import print_info, print_success, print_warning
from ksforge.dynamics import SolverParams
from ksforge.spectral import Grid


USER_CONFIG_DIR = "~/.config/ksforge"
USER_CONFIG_FILE = "ksforge.yaml"

DEFAULT_CONFIG = {
    "L": 32 * math.pi,
    "N": 0,
    "dt": 0.05,
    "t_end": 80.0,
    "save_stride": 5,
    "seed": 2021,
    "initial": "random",
    "project_mean": True,
    "sigma": 2.0,
    "t_transient": 50.0,
    "stripe_threshold": 0.0,
    "smooth_slope": True,
    "min_stripe_width": 0.0,
    "delta0": 1e-7,
    "renorm_interval": 1.0,
    "lyapunov_window": 500.0,
    "linear_t_span": 1.0,
    "sweep_L": [16 * math.pi, 32 * math.pi, 64 * math.pi],
    "sweep_seeds": [2021],
    "jobs": 1,
    "out_dir": "ksforge-out",
    "image_width": 0,
    "image_height": 0,
    "overlay": True,
    "png": False,
    "export_csv": False,
}

COMMENTS = {
    "L": "domain length; multiples of pi may be written as 32pi",
    "N": "grid points (even, >= 16); 0 derives N from L",
    "dt": "ETDRK4 time step, at most 0.5",
    "t_end": "final time, a whole number of steps",
    "save_stride": "keep every save_stride-th step",
    "seed": "64-bit seed of the initial data",
    "initial": "random (uniform on [-1, 1]) or zero",
    "project_mean": "remove the mean every step",
    "sigma": "standard deviation of the slope-smoothing Gaussian",
    "t_transient": "events and densities before this time are transient",
    "stripe_threshold": "a stripe is where the slope is below this value",
    "smooth_slope": "smooth u_x before thresholding",
    "min_stripe_width": "drop narrower arcs (0 keeps all)",
    "delta0": "initial separation for Lyapunov estimates",
    "renorm_interval": "time between renormalisations",
    "lyapunov_window": "accumulation time after the transient",
    "linear_t_span": "duration of each per-mode growth measurement",
    "sweep_L": "domain lengths of the density sweep",
    "sweep_seeds": "seeds run at every swept length",
    "jobs": "concurrent sweep runs",
    "out_dir": "output directory",
    "image_width": "heatmap width in pixels (0: one column per snapshot)",
    "image_height": "heatmap height in pixels (0: one row per grid point)",
    "overlay": "tint stripes in the overlay image",
    "png": "also write PNG copies when matplotlib is available",
    "export_csv": "also write the trajectory as (t, x, u) CSV",
}

_PI_LENGTH = re.compile(r"^\s*([0-9.eE+-]*)\s*\*?\s*pi\s*$")


def parse_length(value) -> float:
    """Accept plain numbers or multiples of pi such as "32pi" or "2*pi"."""
    if isinstance(value, str):
        match = _PI_LENGTH.match(value)
        if match:
            factor = match.group(1)
            return (float(factor) if factor else 1.0) * math.pi
        return float(value)
    return float(value)


def default_points(L: float) -> int:
    """Smallest even N whose 2/3-rule cutoff wavenumber reaches 4, doubled for margin."""
    # Round first so that 32pi gives 256 despite the inexact product.
    return max(16, 2 * math.ceil(round(4 * L / math.pi, 9)))


@dataclass(frozen=True)
class RunConfig:
    L: float
    N: int
    dt: float
    t_end: float
    save_stride: int
    seed: int
    initial: str
    project_mean: bool
    sigma: float
    t_transient: float
    stripe_threshold: float
    smooth_slope: bool
    min_stripe_width: float
    delta0: float
    renorm_interval: float
    lyapunov_window: float
    linear_t_span: float
    sweep_L: tuple
    sweep_seeds: tuple
    jobs: int
    out_dir: str
    image_width: int
    image_height: int
    overlay: bool
    png: bool
    export_csv: bool

    def __post_init__(self):
        for name in ("L", "dt", "t_end", "sigma", "delta0", "renorm_interval",
                     "lyapunov_window", "linear_t_span"):
            if not getattr(self, name) > 0:
                raise ValueError(f"Config value '{name}' must be positive, got {getattr(self, name)}.")
        for name in ("t_transient", "min_stripe_width", "N", "image_width", "image_height"):
            if getattr(self, name) < 0:
                raise ValueError(f"Config value '{name}' must not be negative, got {getattr(self, name)}.")
        if self.save_stride < 1 or self.jobs < 1:
            raise ValueError("save_stride and jobs must be at least 1.")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}.")
        if self.initial not in ("random", "zero"):
            raise ValueError(f"initial must be 'random' or 'zero', got '{self.initial}'.")
        if not self.sweep_L or not self.sweep_seeds:
            raise ValueError("sweep_L and sweep_seeds must not be empty.")

    @classmethod
    def from_mapping(cls, mapping: dict) -> "RunConfig":
        unknown = sorted(set(mapping) - set(DEFAULT_CONFIG))
        if unknown:
            raise ValueError(f"Unknown config key(s): {', '.join(unknown)}.")
        missing = sorted(set(DEFAULT_CONFIG) - set(mapping))
        if missing:
            raise ValueError(f"Missing config key(s): {', '.join(missing)}.")
        return cls(
            L=parse_length(mapping["L"]),
            N=int(mapping["N"]),
            dt=float(mapping["dt"]),
            t_end=float(mapping["t_end"]),
            save_stride=int(mapping["save_stride"]),
            seed=int(mapping["seed"]),
            initial=str(mapping["initial"]),
            project_mean=_flag(mapping, "project_mean"),
            sigma=float(mapping["sigma"]),
            t_transient=float(mapping["t_transient"]),
            stripe_threshold=float(mapping["stripe_threshold"]),
            smooth_slope=_flag(mapping, "smooth_slope"),
            min_stripe_width=float(mapping["min_stripe_width"]),
            delta0=float(mapping["delta0"]),
            renorm_interval=float(mapping["renorm_interval"]),
            lyapunov_window=float(mapping["lyapunov_window"]),
            linear_t_span=float(mapping["linear_t_span"]),
            sweep_L=tuple(parse_length(v) for v in _as_list(mapping["sweep_L"])),
            sweep_seeds=tuple(int(v) for v in _as_list(mapping["sweep_seeds"])),
            jobs=int(mapping["jobs"]),
            out_dir=str(mapping["out_dir"]),
            image_width=int(mapping["image_width"]),
            image_height=int(mapping["image_height"]),
            overlay=_flag(mapping, "overlay"),
            png=_flag(mapping, "png"),
            export_csv=_flag(mapping, "export_csv"),
        )

    @classmethod
    def default(cls) -> "RunConfig":
        return cls.from_mapping(DEFAULT_CONFIG)

    def to_dict(self) -> dict:
        settings = dataclasses.asdict(self)
        settings["sweep_L"] = list(self.sweep_L)
        settings["sweep_seeds"] = list(self.sweep_seeds)
        return settings

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    @property
    def points(self) -> int:
        return self.N or default_points(self.L)

    def grid(self) -> Grid:
        return Grid(self.L, self.points)

    def solver_params(self, t_end=None, project_mean=None) -> SolverParams:
        return SolverParams(
            grid=self.grid(),
            dt=self.dt,
            t_end=self.t_end if t_end is None else t_end,
            save_stride=self.save_stride,
            project_mean=self.project_mean if project_mean is None else project_mean,
        )

    def yaml_lines(self):
        """One `key: value` line per setting, in DEFAULT_CONFIG order."""
        settings = self.to_dict()
        ordered = {key: settings[key] for key in DEFAULT_CONFIG}
        # Block style at the top level, flow style for the sweep lists.
        return yaml.safe_dump(ordered, default_flow_style=None, sort_keys=False, width=10**6).splitlines()


def _as_list(value):
    return value if isinstance(value, (list, tuple)) else [value]


def _flag(mapping, key) -> bool:
    value = mapping[key]
    if not isinstance(value, bool):
        raise ValueError(f"Config value '{key}' must be true or false, got {value!r}.")
    return value


def get_templates_path():
    """Get the path to the templates directory."""
    return files("ksforge").joinpath("templates")


def render_config(config: RunConfig) -> str:
    """Render the commented YAML form of a config."""
    entries = [
        {"line": line, "comment": COMMENTS[key]}
        for key, line in zip(DEFAULT_CONFIG, config.yaml_lines())
    ]
    template = Template(get_templates_path().joinpath("run.yaml.template").read_text())
    return template.render(entries=entries)


def save_config(config: RunConfig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_config(config))
    return path


def read_settings(path) -> dict:
    """Parse a flat YAML config file into a dict."""
    with open(path, "r") as f:
        try:
            settings = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ValueError(f"Error parsing YAML configuration file {path}: {e}") from e
    if not isinstance(settings, dict):
        raise ValueError(f"Configuration file {path} must hold a key: value mapping.")
    return settings


def merge_settings(base: dict, override: dict, source: str) -> dict:
    """Overlay `override` on `base`; keys unknown to DEFAULT_CONFIG are rejected."""
    unknown = sorted(set(override) - set(DEFAULT_CONFIG))
    if unknown:
        raise ValueError(f"Unknown config key(s) in {source}: {', '.join(unknown)}.")
    merged = dict(base)
    merged.update({key: value for key, value in override.items() if value is not None})
    return merged


def user_config_path() -> Path:
    return Path(os.path.expanduser(USER_CONFIG_DIR)) / USER_CONFIG_FILE


def load_config(path=None, overrides=None) -> RunConfig:
    """
    Build the run configuration: DEFAULT_CONFIG, then the user file
    `~/.config/ksforge/ksforge.yaml`, then `path`, then `overrides`.
    """
    settings = dict(DEFAULT_CONFIG)

    user_file = user_config_path()
    if user_file.is_file():
        try:
            settings = merge_settings(settings, read_settings(user_file), str(user_file))
        except ValueError as e:
            print_warning(f"Ignoring user configuration: {e}")

    if path is not None:
        if not Path(path).is_file():
            raise FileNotFoundError(f"Configuration file '{path}' not found.")
        settings = merge_settings(settings, read_settings(path), str(path))

    if overrides:
        settings = merge_settings(settings, overrides, "command line")
    return RunConfig.from_mapping(settings)


def run_setup():
    """
    Create the default configuration for ksforge.
    """
    config_file = user_config_path()

    if not config_file.parent.exists():
        config_file.parent.mkdir(parents=True)
        print_info(f"Created configuration directory: {config_file.parent}")

    if not config_file.exists():
        save_config(RunConfig.default(), config_file)
        print_success(f"Default configuration created at: {config_file}")
    else:
        print_info(f"Configuration file already exists at: {config_file}")
