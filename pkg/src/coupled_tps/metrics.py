"""PSNR and SSIM on the [0, 1] intensity domain."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, TooSmall
from .warp import Image

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclass(frozen=True)
class MetricReport:
    psnr: float  # math.inf for identical images
    ssim: float

    def to_dict(self):
        return {"psnr": "inf" if math.isinf(self.psnr) else self.psnr, "ssim": self.ssim}


def _check_pair(a: Image, b: Image):
    if a.samples.shape != b.samples.shape:
        raise DimensionMismatch(f"image shapes differ: {a.samples.shape} vs {b.samples.shape}")


def psnr(a: Image, b: Image, crop=None) -> float:
    """Peak signal-to-noise ratio in dB with peak 1.0.

    ``crop`` is an optional ``(slice_y, slice_x)`` restricting the comparison.
    """
    _check_pair(a, b)
    x, y = a.samples, b.samples
    if crop is not None:
        x, y = x[crop], y[crop]
    diff = x - y
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def gaussian_window(size=SSIM_WINDOW, sigma=SSIM_SIGMA) -> np.ndarray:
    r = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(r * r) / (2.0 * sigma * sigma))
    return g / g.sum()


def _filter_valid(a, g):
    # separable correlation keeping only windows fully inside the image
    n = g.size
    h, w = a.shape
    rows = sum(g[k] * a[:, k : w - n + 1 + k] for k in range(n))
    return sum(g[k] * rows[k : h - n + 1 + k, :] for k in range(n))


def ssim_map(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    g = gaussian_window()
    c1 = (SSIM_K1 * 1.0) ** 2
    c2 = (SSIM_K2 * 1.0) ** 2
    mx = _filter_valid(x, g)
    my = _filter_valid(y, g)
    vx = _filter_valid(x * x, g) - mx * mx
    vy = _filter_valid(y * y, g) - my * my
    cxy = _filter_valid(x * y, g) - mx * my
    num = (2.0 * (mx * my) + c1) * (2.0 * cxy + c2)
    den = (mx * mx + my * my + c1) * (vx + vy + c2)
    return num / den


def ssim(a: Image, b: Image) -> float:
    """Mean single-scale SSIM (11x11 Gaussian window, sigma 1.5), averaged over channels."""
    _check_pair(a, b)
    if min(a.width, a.height) < SSIM_WINDOW:
        raise TooSmall(f"SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels")
    vals = [float(np.mean(ssim_map(a.samples[..., c], b.samples[..., c]))) for c in range(a.channels)]
    return float(np.clip(np.mean(vals), -1.0, 1.0))


def compare(test: Image, reference: Image) -> MetricReport:
    return MetricReport(psnr(test, reference), ssim(test, reference))
