"""Grayscale grid images for score maps and selection masks.

Output is binary PGM (P5, 8-bit): writable with no dependencies and
byte-diffable in tests. An integer scale factor repeats pixels
(nearest neighbor) for comfortable viewing of small grids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError
from .pruning import PrunedSelection
from .significance import SignificanceScores


@dataclass(frozen=True)
class GridImage:
    side: int
    pixels: np.ndarray  # (side, side) uint8


def _require_grid(n: int, side: int) -> None:
    if side < 1 or side * side != n:
        raise GridError(f"side {side} does not square to token count {n}")


def heatmap(scores: SignificanceScores, side: int) -> GridImage:
    """Min-max normalized score grid; a constant vector maps to mid-gray."""
    vec = np.asarray(scores.scores, dtype=np.float64)
    _require_grid(len(vec), side)
    lo, hi = float(vec.min()), float(vec.max())
    if hi > lo:
        levels = np.rint((vec - lo) / (hi - lo) * 255.0)
    else:
        levels = np.full(len(vec), 128.0)
    pixels = levels.astype(np.uint8).reshape(side, side)
    return GridImage(side=side, pixels=pixels)


def selection_mask(sel: PrunedSelection, side: int) -> GridImage:
    """Kept tokens white (255), dropped tokens black (0)."""
    _require_grid(sel.n_original, side)
    flat = np.zeros(sel.n_original, dtype=np.uint8)
    flat[list(sel.kept)] = 255
    return GridImage(side=side, pixels=flat.reshape(side, side))


def pgm_bytes(image: GridImage, scale: int = 1) -> bytes:
    if scale < 1:
        raise ValueError(f"scale must be >= 1, got {scale}")
    px = image.pixels
    if scale > 1:
        px = np.repeat(np.repeat(px, scale, axis=0), scale, axis=1)
    header = f"P5\n{px.shape[1]} {px.shape[0]}\n255\n".encode("ascii")
    return header + px.tobytes(order="C")


def write_pgm(image: GridImage, path, scale: int = 1) -> None:
    with open(path, "wb") as fh:
        fh.write(pgm_bytes(image, scale=scale))
