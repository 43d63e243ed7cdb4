"""Backward bilinear warping of images."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._sampling import bilinear_zero, map_row_bands
from .errors import DimensionMismatch, InvalidDimensions
from .flow import FlowField, PixelGrid, tps_to_flow
from .tps import TpsTransform


@dataclass(frozen=True, eq=False)
class Image:
    """Intensities in ``[0, 1]`` stored as ``samples[y, x, channel]``.

    A 2-D array is accepted and treated as a single channel.
    """

    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=np.float64)
        if s.ndim == 2:
            s = s[..., None]
        if s.ndim != 3 or s.shape[2] not in (1, 3):
            raise ValueError(f"image must be (H, W), (H, W, 1) or (H, W, 3), got {s.shape}")
        if s.shape[0] < 2 or s.shape[1] < 2:
            raise InvalidDimensions(f"image must be at least 2x2, got {s.shape[1]}x{s.shape[0]}")
        if not np.all(np.isfinite(s)) or s.min() < 0.0 or s.max() > 1.0:
            raise ValueError("image samples must lie in [0, 1]")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def channels(self) -> int:
        return self.samples.shape[2]

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return np.array_equal(self.samples, other.samples)

    __hash__ = None


def bilinear_sample(img: Image, at) -> np.ndarray:
    """Per-channel intensity at real position(s) ``(..., 2)``; 0 outside the frame."""
    at = np.asarray(at, dtype=np.float64)
    if not np.all(np.isfinite(at)):
        raise ValueError("sampling positions must be finite")
    return bilinear_zero(img.samples, at[..., 0], at[..., 1])


def backward_warp(img: Image, f: FlowField, *, threads: int = 1) -> Image:
    """``out(x) = img(x + f(x))`` with bilinear sampling and zero fill."""
    if (img.width, img.height) != (f.width, f.height):
        raise DimensionMismatch(
            f"image is {img.width}x{img.height} but flow is {f.width}x{f.height}"
        )
    grid = f.grid

    def band(r0, r1):
        xs, ys = grid.mesh(r0, r1)
        d = f.vectors[r0:r1]
        return bilinear_zero(img.samples, xs + d[..., 0], ys + d[..., 1])

    out = map_row_bands(band, img.height, threads)
    return Image(np.clip(out, 0.0, 1.0))


def iterative_warp_step(img: Image, inverse_map: TpsTransform, *, threads: int = 1) -> Image:
    """One re-interpolating step ``I_i = I_{i-1}(T_i^{-1}(G))``."""
    flow = tps_to_flow(inverse_map, PixelGrid(img.width, img.height), threads=threads)
    return backward_warp(img, flow, threads=threads)
