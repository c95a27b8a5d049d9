import os
import sys

# -------------------- Terminal Colors -------------------- #
RED = "\033[0;31m"
GREEN = "\033[0;32m"
YELLOW = "\033[1;33m"
NC = "\033[0m"  # No color


def _use_color(stream) -> bool:
    """Color only interactive streams, and never when NO_COLOR is set."""
    if os.environ.get("NO_COLOR"):
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _emit(message: str, color: str, stream) -> None:
    if _use_color(stream):
        print(f"{color}{message}{NC}", file=stream)
    else:
        print(message, file=stream)


def print_error(message):
    """Print an error message in red on stderr."""
    _emit(f"Error: {message}", RED, sys.stderr)


def print_success(message):
    """Print a success message in green."""
    _emit(str(message), GREEN, sys.stdout)


def print_info(message):
    """Print a progress message."""
    _emit(str(message), YELLOW, sys.stdout)


def print_warning(message):
    """Print a warning message in yellow."""
    _emit(f"Warning: {message}", YELLOW, sys.stdout)
