"""Bilinear sampling of rasters and row-band parallelism.

Both samplers are purely elementwise, so splitting the output into bands
never changes a bit of the result.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

BAND_ROWS = 32
# positions this close outside the frame count as on the border; absorbs
# round-off in flows that land exactly on an edge pixel
BORDER_EPS = 1e-9


def _gather(raster, x0, y0, fx, fy):
    h, w = raster.shape[:2]
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = fx[..., None]
    fy = fy[..., None]
    top = raster[y0, x0] * (1.0 - fx) + raster[y0, x1] * fx
    bottom = raster[y1, x0] * (1.0 - fx) + raster[y1, x1] * fx
    return top * (1.0 - fy) + bottom * fy


def bilinear_clamp(raster, xs, ys):
    """Sample ``raster[..., C]`` at real positions, clamping to the border."""
    h, w = raster.shape[:2]
    xs = np.clip(np.asarray(xs, dtype=np.float64), 0.0, w - 1)
    ys = np.clip(np.asarray(ys, dtype=np.float64), 0.0, h - 1)
    x0 = np.floor(xs)
    y0 = np.floor(ys)
    return _gather(raster, x0.astype(np.intp), y0.astype(np.intp), xs - x0, ys - y0)


def bilinear_zero(raster, xs, ys):
    """Sample ``raster[..., C]`` at real positions; outside ``[0,W-1]x[0,H-1]`` is 0."""
    h, w = raster.shape[:2]
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    e = BORDER_EPS
    inside = (xs >= -e) & (xs <= w - 1 + e) & (ys >= -e) & (ys <= h - 1 + e)
    xc = np.where(inside, np.clip(xs, 0.0, w - 1), 0.0)
    yc = np.where(inside, np.clip(ys, 0.0, h - 1), 0.0)
    x0 = np.floor(xc)
    y0 = np.floor(yc)
    out = _gather(raster, x0.astype(np.intp), y0.astype(np.intp), xc - x0, yc - y0)
    out[~inside] = 0.0
    return out


def map_row_bands(fn, height, threads=1):
    """Evaluate ``fn(row_start, row_stop)`` over fixed row bands and stack the results.

    Band boundaries depend only on ``height``; ``threads`` only changes how
    many bands run at once.
    """
    bands = [(r, min(r + BAND_ROWS, height)) for r in range(0, height, BAND_ROWS)]
    if threads is None or threads <= 1 or len(bands) == 1:
        parts = [fn(a, b) for a, b in bands]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ab: fn(*ab), bands))
    return np.concatenate(parts, axis=0)
