"""Synthetic test images with analytic ground truth."""

import numpy as np

from .flow import PixelGrid, rotation_matrix
from .warp import Image


def checkerboard_value(xs, ys, period=4):
    """Continuous checkerboard whose samples at integer pixel centers form the raster.

    Squares are ``period / 2`` pixels wide; pixel ``k`` covers ``[k - 0.5, k + 0.5)``.
    """
    half = period / 2.0
    cx = np.floor((np.asarray(xs) + 0.5) / half)
    cy = np.floor((np.asarray(ys) + 0.5) / half)
    return np.mod(cx + cy, 2.0)


def checkerboard(width, height, period=4) -> Image:
    xs, ys = PixelGrid(width, height).mesh()
    return Image(checkerboard_value(xs, ys, period))


def rotated_positions(width, height, angle_deg):
    """``R(angle)(x - c) + c`` for every pixel, as ``(xs, ys)``."""
    grid = PixelGrid(width, height)
    c = grid.center
    xs, ys = grid.mesh()
    R = rotation_matrix(angle_deg)
    dx, dy = xs - c[0], ys - c[1]
    return R[0, 0] * dx + R[0, 1] * dy + c[0], R[1, 0] * dx + R[1, 1] * dy + c[1]


def rotated_checkerboard(width, height, angle_deg, period=4) -> Image:
    """Point-sampled checkerboard seen through the backward map ``R(angle)`` about the center.

    ``rotated_checkerboard(w, h, -a)`` is the board tilted by ``a``; warping it
    with the backward rotation by ``a`` restores the upright board.
    """
    xs, ys = rotated_positions(width, height, angle_deg)
    return Image(checkerboard_value(xs, ys, period))


def smooth_texture(width, height, rng, channels=1, octaves=4) -> Image:
    """Band-limited random texture in ``[0, 1]`` (sum of random sinusoids)."""
    xs, ys = PixelGrid(width, height).mesh()
    out = np.zeros((height, width, channels))
    for c in range(channels):
        acc = np.zeros((height, width))
        for k in range(octaves):
            freq = rng.uniform(0.02, 0.25, size=2)
            phase = rng.uniform(0, 2 * np.pi)
            acc += np.sin(freq[0] * xs * (k + 1) + freq[1] * ys * (k + 1) + phase) / (k + 1)
        acc -= acc.min()
        out[..., c] = acc / max(acc.max(), 1e-12)
    return Image(out)
