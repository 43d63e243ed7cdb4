"""Fixed target control-point layouts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensions
from .tps import ControlPointSet

DEFAULT_FRAME = (512, 384)  # width, height
UNIFORM_PRESET = (7, 9)  # rows, cols -> 63 points
PORTRAIT_PRESET = (8, 10)  # rows, cols -> 80 points


@dataclass(frozen=True)
class ControlLayout:
    kind: str
    rows: int
    cols: int
    points: ControlPointSet

    @property
    def width(self) -> int:
        return self.points.frame_width

    @property
    def height(self) -> int:
        return self.points.frame_height


def _check(rows, cols, width, height):
    if rows < 2 or cols < 2:
        raise InvalidDimensions(f"layout needs at least 2 rows and 2 cols, got {rows}x{cols}")
    if width < 2 or height < 2:
        raise InvalidDimensions(f"frame must be at least 2x2, got {width}x{height}")


def _lattice(xs, ys, width, height):
    gx, gy = np.meshgrid(xs, ys)
    return ControlPointSet(np.stack([gx.ravel(), gy.ravel()], axis=-1), width, height)


def uniform_layout(rows: int, cols: int, width: int, height: int) -> ControlLayout:
    """Evenly spaced lattice spanning the frame, corners included, row-major."""
    _check(rows, cols, width, height)
    xs = np.arange(cols) * (width - 1) / (cols - 1)
    ys = np.arange(rows) * (height - 1) / (rows - 1)
    return ControlLayout("uniform", rows, cols, _lattice(xs, ys, width, height))


def lobatto_nodes(n: int) -> np.ndarray:
    """``(1 - cos(pi j / (n-1))) / 2`` for ``j = 0..n-1``; endpoints are exact."""
    u = (1.0 - np.cos(np.pi * np.arange(n) / (n - 1))) / 2.0
    u[0], u[-1] = 0.0, 1.0
    # enforce mirror symmetry so a centered node lands exactly on the midpoint
    return (u + (1.0 - u[::-1])) / 2.0


def boundary_dense_layout(rows: int, cols: int, width: int, height: int) -> ControlLayout:
    """Chebyshev-Lobatto lattice: points cluster toward all four borders."""
    _check(rows, cols, width, height)
    xs = lobatto_nodes(cols) * (width - 1)
    ys = lobatto_nodes(rows) * (height - 1)
    return ControlLayout("boundary_dense", rows, cols, _lattice(xs, ys, width, height))


def default_layout(kind: str = "uniform", width: int = DEFAULT_FRAME[0], height: int = DEFAULT_FRAME[1]):
    if kind == "uniform":
        return uniform_layout(*UNIFORM_PRESET, width, height)
    if kind in ("boundary_dense", "chebyshev", "portrait"):
        return boundary_dense_layout(*PORTRAIT_PRESET, width, height)
    raise ValueError(f"unknown layout kind {kind!r}")


def layout_from_points(points: ControlPointSet, kind: str = "custom") -> ControlLayout:
    return ControlLayout(kind, 0, 0, points)
