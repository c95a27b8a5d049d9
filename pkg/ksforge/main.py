#!/usr/bin/env python3
import argparse
import sys

from ksforge.colors import print_error
from ksforge.config import load_config, run_setup
from ksforge.dynamics import BlowUpError
from ksforge.experiments import (
    cmd_density_sweep,
    cmd_linear_check,
    cmd_lyapunov,
    cmd_modes,
    cmd_simulate,
    cmd_stripes,
)


def common_options() -> argparse.ArgumentParser:
    """Flags shared by every run subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", default=None, help="Flat YAML config file.")
    common.add_argument("-s", "--seed", type=int, default=None, help="64-bit seed of the initial data.")
    common.add_argument("-o", "--out", dest="out_dir", default=None, help="Output directory.")
    common.add_argument("-j", "--jobs", type=int, default=None, help="Concurrent runs for sweeps.")
    common.add_argument("--L", dest="L", default=None, help="Domain length, e.g. 100.5 or 32pi.")
    common.add_argument("--N", dest="N", type=int, default=None, help="Grid points (0 derives N from L).")
    common.add_argument("--dt", type=float, default=None, help="Time step.")
    common.add_argument("--t-end", dest="t_end", type=float, default=None, help="Final time.")
    return common


def configure_parsers(parser):
    """
    Configure the command-line argument parser with subcommands and their arguments.

    Args:
        parser (argparse.ArgumentParser): The main parser object.
    """
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = common_options()

    subparsers.add_parser(
        "simulate", parents=[common],
        help="Integrate from seeded random data; write the trajectory and a heatmap.",
    )

    stripes_parser = subparsers.add_parser(
        "stripes", parents=[common],
        help="Track stripes of a stored trajectory; write events, density and an overlay image.",
    )
    stripes_parser.add_argument(
        "-t", "--trajectory", default=None,
        help="Trajectory file (default: <out>/trajectory.kstraj).",
    )

    subparsers.add_parser(
        "linear-check", parents=[common],
        help="Compare measured small-amplitude growth rates with k^2 - k^4.",
    )

    sweep_parser = subparsers.add_parser(
        "density-sweep", parents=[common],
        help="Stripe density over several domain lengths and seeds.",
    )
    sweep_parser.add_argument("--L-values", dest="sweep_L", nargs="+", default=None,
                              help="Domain lengths to sweep, e.g. 16pi 32pi 64pi.")
    sweep_parser.add_argument("--seeds", dest="sweep_seeds", type=int, nargs="+", default=None,
                              help="Seeds run at every length.")

    subparsers.add_parser(
        "lyapunov", parents=[common],
        help="Estimate the leading Lyapunov exponent.",
    )

    subparsers.add_parser(
        "modes", parents=[common],
        help="Print the unstable linear modes as CSV.",
    )

    subparsers.add_parser("setup", help="Set up default configurations for ksforge")


OVERRIDE_KEYS = ("seed", "out_dir", "jobs", "L", "N", "dt", "t_end", "sweep_L", "sweep_seeds")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Kuramoto-Sivashinsky solver, stripe tracker and chaos diagnostics",
        epilog="Simulate, track stripes, and check linear theory and chaos from one config.",
    )

    # Configure the parsers
    configure_parsers(parser)

    # Parse arguments from the command line
    args = parser.parse_args(argv)

    try:
        if args.command == "setup":
            run_setup()
            return 0

        overrides = {key: getattr(args, key, None) for key in OVERRIDE_KEYS}
        config = load_config(args.config, overrides)

        match args.command:
            case "simulate":
                cmd_simulate(config)
            case "stripes":
                cmd_stripes(config, args.trajectory)
            case "linear-check":
                cmd_linear_check(config)
            case "density-sweep":
                if cmd_density_sweep(config).failures:
                    return 1
            case "lyapunov":
                cmd_lyapunov(config)
            case "modes":
                cmd_modes(config)

    except BlowUpError as e:
        print_error(str(e))
        return 2
    except Exception as e:
        print_error(f"{type(e).__name__}: {e}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
