"""Spacetime rasters: t runs left to right, x bottom to top.

Values map through a fixed 256-entry blue-white-red table:

    index i < 128:   (2i, 2i, 255)
    index i >= 128:  (255, 510 - 2i, 510 - 2i)

A value u >= 0 lands in index floor(128 (u / vmax + 1)) clipped to 128..255,
with vmax the largest |u| of the trajectory unless given; u < 0 lands in 255
minus the index of |u|. Entry 255 - i is entry i with red and blue swapped,
so u -> -u swaps hue and keeps lightness for every u other than zero.
"""
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ksforge.colors import print_warning


@dataclass(frozen=True)
class HeatmapSpec:
    width: int = 0
    height: int = 0
    vmax: float = None
    overlay: bool = True
    overlay_color: tuple = (0, 160, 0)


def diverging_table() -> np.ndarray:
    i = np.arange(256)
    full = np.full(256, 255)
    cool = np.stack([2 * i, 2 * i, full], axis=1)
    warm = np.stack([full, 510 - 2 * i, 510 - 2 * i], axis=1)
    return np.where((i < 128)[:, None], cool, warm).astype(np.uint8)


COLORMAP = diverging_table()


def color_indices(values, vmax: float) -> np.ndarray:
    """Table index of each value; -u lands on the mirror entry 255 - index of u.

    Zero maps to 128, the first entry on the red side, so it is the one value
    without a mirrored partner.
    """
    values = np.asarray(values, dtype=np.float64)
    upper = np.clip(np.floor(128.0 * (np.abs(values) / vmax + 1.0)), 128, 255).astype(np.intp)
    return np.where(values < 0, 255 - upper, upper)


def _layout(raster: np.ndarray, spec: HeatmapSpec) -> np.ndarray:
    """(time, x) samples to image rows (x descending) and columns (time)."""
    image = raster.T[::-1]
    rows, cols = image.shape[:2]
    height = spec.height or rows
    width = spec.width or cols
    row_index = np.arange(height) * rows // height
    col_index = np.arange(width) * cols // width
    return image[row_index][:, col_index]


def heatmap(values: np.ndarray, spec: HeatmapSpec = HeatmapSpec()) -> np.ndarray:
    """RGB image (height, width, 3) of a (time, x) array of u values."""
    values = np.asarray(values, dtype=np.float64)
    vmax = spec.vmax if spec.vmax is not None else float(np.abs(values).max(initial=0.0))
    if vmax == 0:
        vmax = 1.0
    return COLORMAP[color_indices(_layout(values, spec), vmax)]


def overlay(rgb: np.ndarray, mask: np.ndarray, spec: HeatmapSpec = HeatmapSpec()) -> np.ndarray:
    """Blend the overlay colour half-and-half into pixels inside the (time, x) mask."""
    inside = _layout(np.asarray(mask, dtype=bool), spec)
    tinted = ((rgb.astype(np.uint16) + np.array(spec.overlay_color, dtype=np.uint16)) // 2)
    return np.where(inside[..., None], tinted.astype(np.uint8), rgb)


def mask_image(mask: np.ndarray, spec: HeatmapSpec = HeatmapSpec()) -> np.ndarray:
    return _layout(np.asarray(mask, dtype=bool), spec)


def _comment_block(comments) -> bytes:
    return b"".join(f"# {line}\n".encode("utf-8") for line in comments)


def write_ppm(path, rgb: np.ndarray, comments=()) -> Path:
    """Binary portable pixmap (P6)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    height, width = rgb.shape[:2]
    with open(path, "wb") as f:
        f.write(b"P6\n" + _comment_block(comments) + f"{width} {height}\n255\n".encode())
        f.write(np.ascontiguousarray(rgb, dtype=np.uint8).tobytes())
    return path


def read_ppm(path) -> np.ndarray:
    """Read back a P6 file written by write_ppm."""
    data = Path(path).read_bytes()
    lines, pos = [], 0
    while len(lines) < 3:
        end = data.index(b"\n", pos)
        line = data[pos:end]
        pos = end + 1
        if not line.startswith(b"#"):
            lines.append(line)
    if lines[0] != b"P6":
        raise ValueError(f"'{path}' is not a binary PPM file.")
    width, height = (int(v) for v in lines[1].split())
    return np.frombuffer(data, dtype=np.uint8, offset=pos).reshape(height, width, 3)


def write_pbm(path, bits: np.ndarray, comments=()) -> Path:
    """Binary portable bitmap (P4); set bits are drawn black."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    height, width = bits.shape
    with open(path, "wb") as f:
        f.write(b"P4\n" + _comment_block(comments) + f"{width} {height}\n".encode())
        f.write(np.packbits(bits.astype(np.uint8), axis=1).tobytes())
    return path


def save_png(path, rgb: np.ndarray, comments=()):
    """PNG copy through matplotlib; skipped with a warning if it is not installed."""
    try:
        from matplotlib import image as mpimg
    except ImportError:
        print_warning(f"matplotlib is not installed; skipping {path}.")
        return None
    path = Path(path)
    mpimg.imsave(path, rgb, format="png", metadata={"Description": "\n".join(comments)})
    return path
