"""Dense warping flows.

A flow is a backward displacement field: the output pixel at ``x`` samples
its source at ``x + F(x)``. Pixel centers are 0-indexed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._sampling import bilinear_clamp, map_row_bands
from .errors import DimensionMismatch, InvalidDimensions
from .tps import TpsTransform, tps_displacement


@dataclass(frozen=True)
class PixelGrid:
    width: int
    height: int

    def __post_init__(self):
        if int(self.width) < 2 or int(self.height) < 2:
            raise InvalidDimensions(f"grid must be at least 2x2, got {self.width}x{self.height}")

    @property
    def center(self) -> np.ndarray:
        return np.array([(self.width - 1) / 2.0, (self.height - 1) / 2.0])

    def mesh(self, row_start=0, row_stop=None):
        """``(xs, ys)`` float arrays of shape ``(rows, width)``."""
        row_stop = self.height if row_stop is None else row_stop
        ys, xs = np.mgrid[row_start:row_stop, 0 : self.width]
        return xs.astype(np.float64), ys.astype(np.float64)

    @property
    def coordinates(self) -> np.ndarray:
        """All pixel centers as ``(H*W, 2)`` in row-major order."""
        xs, ys = self.mesh()
        return np.stack([xs.ravel(), ys.ravel()], axis=-1)


def make_grid(width: int, height: int) -> PixelGrid:
    return PixelGrid(int(width), int(height))


@dataclass(frozen=True, eq=False)
class FlowField:
    """``vectors[y, x] = (u, v)``, displacement in pixels."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=np.float64)
        if v.ndim != 3 or v.shape[2] != 2:
            raise ValueError(f"flow must have shape (H, W, 2), got {v.shape}")
        if v.shape[0] < 2 or v.shape[1] < 2:
            raise InvalidDimensions(f"flow must be at least 2x2, got {v.shape[1]}x{v.shape[0]}")
        if not np.all(np.isfinite(v)):
            raise ValueError("flow components must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "vectors", v)

    @property
    def width(self) -> int:
        return self.vectors.shape[1]

    @property
    def height(self) -> int:
        return self.vectors.shape[0]

    @property
    def grid(self) -> PixelGrid:
        return PixelGrid(self.width, self.height)

    def magnitude(self) -> np.ndarray:
        return np.hypot(self.vectors[..., 0], self.vectors[..., 1])

    def __eq__(self, other):
        if not isinstance(other, FlowField):
            return NotImplemented
        return np.array_equal(self.vectors, other.vectors)

    __hash__ = None

    @classmethod
    def zeros(cls, width: int, height: int) -> FlowField:
        return cls(np.zeros((height, width, 2)))

    @classmethod
    def constant(cls, width: int, height: int, u: float, v: float) -> FlowField:
        vec = np.empty((height, width, 2))
        vec[..., 0] = u
        vec[..., 1] = v
        return cls(vec)


def rotation_matrix(angle_deg: float) -> np.ndarray:
    """``[[cos, -sin], [sin, cos]]`` acting on ``(x, y)`` pixel coordinates."""
    a = np.deg2rad(angle_deg)
    return np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])


def affine_flow(width: int, height: int, matrix, offset=(0.0, 0.0)) -> FlowField:
    """Flow of the backward map ``x -> matrix @ x + offset``."""
    grid = PixelGrid(width, height)
    xs, ys = grid.mesh()
    m = np.asarray(matrix, dtype=np.float64)
    u = m[0, 0] * xs + m[0, 1] * ys + offset[0] - xs
    v = m[1, 0] * xs + m[1, 1] * ys + offset[1] - ys
    return FlowField(np.stack([u, v], axis=-1))


def rotation_flow(width: int, height: int, angle_deg: float) -> FlowField:
    """Analytic ``(R - I)(x - c)`` about the frame center."""
    c = PixelGrid(width, height).center
    R = rotation_matrix(angle_deg)
    return affine_flow(width, height, R, c - R @ c)


def tps_to_flow(inverse_map: TpsTransform, grid: PixelGrid, *, threads: int = 1) -> FlowField:
    """``inverse_map(G) - G`` sampled on every pixel of ``grid``."""

    def band(r0, r1):
        xs, ys = grid.mesh(r0, r1)
        pts = np.stack([xs.ravel(), ys.ravel()], axis=-1)
        return tps_displacement(inverse_map, pts).reshape(r1 - r0, grid.width, 2)

    return FlowField(map_row_bands(band, grid.height, threads))


def sample_flow(f: FlowField, at) -> np.ndarray:
    """Bilinear flow lookup at real positions ``(..., 2)``; clamps to the border."""
    at = np.asarray(at, dtype=np.float64)
    if not np.all(np.isfinite(at)):
        raise ValueError("sampling positions must be finite")
    return bilinear_clamp(f.vectors, at[..., 0], at[..., 1])


def compose_flows(previous: FlowField, delta: FlowField, *, threads: int = 1) -> FlowField:
    """Couple flows: ``F(x) = previous(x + delta(x)) + delta(x)``.

    Warping once with the result is equivalent to warping with ``previous``
    and then warping that output with ``delta``.
    """
    if previous.vectors.shape != delta.vectors.shape:
        raise DimensionMismatch(
            f"cannot compose {previous.width}x{previous.height} with {delta.width}x{delta.height}"
        )
    grid = delta.grid

    def band(r0, r1):
        xs, ys = grid.mesh(r0, r1)
        d = delta.vectors[r0:r1]
        carried = bilinear_clamp(previous.vectors, xs + d[..., 0], ys + d[..., 1])
        return carried + d

    return FlowField(map_row_bands(band, grid.height, threads))


def resize_flow(f: FlowField, new_width: int, new_height: int) -> FlowField:
    """Resample a flow to a new resolution, rescaling its vectors.

    Pixel centers are aligned by area (``x_old = (x_new + 0.5) * W/W' - 0.5``),
    the geometry under which a uniform size ratio is also the right magnitude
    ratio; u is multiplied by ``W'/W`` and v by ``H'/H``.
    """
    if int(new_width) < 2 or int(new_height) < 2:
        raise InvalidDimensions(f"target size must be at least 2x2, got {new_width}x{new_height}")
    new_width, new_height = int(new_width), int(new_height)
    if (new_width, new_height) == (f.width, f.height):
        return FlowField(f.vectors.copy())
    sx = f.width / new_width
    sy = f.height / new_height
    xs, ys = PixelGrid(new_width, new_height).mesh()
    sampled = bilinear_clamp(f.vectors, (xs + 0.5) * sx - 0.5, (ys + 0.5) * sy - 0.5)
    sampled[..., 0] *= new_width / f.width
    sampled[..., 1] *= new_height / f.height
    return FlowField(sampled)
