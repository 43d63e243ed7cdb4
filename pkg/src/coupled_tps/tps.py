"""Thin-plate spline solving and evaluation.

A TPS maps a point ``p`` to

    T(p) = C + M p + sum_i w_i * O(|p - p_i|),    O(r) = r^2 log r^2

and is fixed by the interpolation conditions ``T(p_i) = q_i`` together with
``sum_i w_i = 0`` and ``sum_i p_i w_i^T = 0``.

Solving happens in an isotropically normalized frame (origin at the frame
center, scale ``2 / max(width, height)``). TPS is equivariant under isotropic
similarities, so the map is unchanged while the kernel matrix stays well
scaled. The right-hand side is the displacement ``q_i - p_i`` rather than
``q_i``; since TPS reproduces affine maps this gives the same interpolant, and
an identity correspondence yields parameters that are exactly zero.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import CountMismatch, DegenerateConfiguration, DuplicatePoints, InvalidDimensions

PIVOT_TOL = 1e-10
DUPLICATE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ControlPointSet:
    """Ordered 2-D points in pixel coordinates plus the frame they live in.

    Coordinates are ``(x, y)`` with the origin at the top-left pixel center,
    x to the right and y downward. Points may fall outside the frame (predicted
    source points often do); only the frame dimensions are constrained.
    """

    points: np.ndarray
    frame_width: int
    frame_height: int

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"points must have shape (N, 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("control points must be finite")
        if int(self.frame_width) < 2 or int(self.frame_height) < 2:
            raise InvalidDimensions(
                f"frame must be at least 2x2, got {self.frame_width}x{self.frame_height}"
            )
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "frame_width", int(self.frame_width))
        object.__setattr__(self, "frame_height", int(self.frame_height))

    def __len__(self):
        return self.points.shape[0]

    def __eq__(self, other):
        if not isinstance(other, ControlPointSet):
            return NotImplemented
        return (
            self.frame_width == other.frame_width
            and self.frame_height == other.frame_height
            and np.array_equal(self.points, other.points)
        )

    __hash__ = None

    def with_points(self, points) -> ControlPointSet:
        return ControlPointSet(points, self.frame_width, self.frame_height)


class Normalization(NamedTuple):
    """Isotropic similarity used for conditioning: ``p_norm = scale * (p - center)``."""

    center: np.ndarray
    scale: float

    def forward(self, pts):
        return (np.asarray(pts, dtype=np.float64) - self.center) * self.scale


def frame_normalization(width: int, height: int) -> Normalization:
    center = np.array([(width - 1) / 2.0, (height - 1) / 2.0])
    return Normalization(center, 2.0 / max(width, height))


IDENTITY_NORMALIZATION = Normalization(np.zeros(2), 1.0)


def radial_kernel(r):
    """``r^2 log(r^2)`` with the continuous limit 0 at ``r = 0``.

    Accepts a scalar or an array of nonnegative distances.
    """
    r = np.asarray(r, dtype=np.float64)
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise ValueError("radial_kernel expects finite nonnegative distances")
    out = _kernel_from_sq(r * r)
    return float(out) if out.ndim == 0 else out


def _kernel_from_sq(r2):
    r2 = np.asarray(r2, dtype=np.float64)
    log_r2 = np.zeros_like(r2)
    np.log(r2, out=log_r2, where=r2 > 0)
    return r2 * log_r2


def _kernel_matrix(a, b):
    diff = a[:, None, :] - b[None, :, :]
    return _kernel_from_sq(np.einsum("ijk,ijk->ij", diff, diff))


@dataclass(frozen=True, eq=False)
class TpsTransform:
    """Solved TPS parameters.

    The parameters are held in the normalized frame (``_offset``, ``_disp_matrix``,
    ``_weights``) as the displacement part of the map; the public
    ``affine_offset``, ``affine_matrix`` and ``kernel_weights`` give the
    equivalent pixel-frame parameters of the full map.
    """

    kernel_centers: ControlPointSet
    normalization: Normalization
    _offset: np.ndarray
    _disp_matrix: np.ndarray
    _weights: np.ndarray

    @property
    def normalized_centers(self) -> np.ndarray:
        return self.normalization.forward(self.kernel_centers.points)

    @property
    def normalized_weights(self) -> np.ndarray:
        return self._weights

    @property
    def normalized_affine(self) -> tuple[np.ndarray, np.ndarray]:
        """``(C, M)`` of the full map in normalized units."""
        return self._offset.copy(), np.eye(2) + self._disp_matrix

    @property
    def affine_matrix(self) -> np.ndarray:
        return np.eye(2) + self._disp_matrix

    @property
    def kernel_weights(self) -> np.ndarray:
        return self._weights * self.normalization.scale

    @property
    def affine_offset(self) -> np.ndarray:
        # O(s r) = s^2 O(r) + s^2 log(s^2) r^2, and the r^2 part collapses to a
        # constant under the side conditions on the weights.
        c, s = self.normalization
        pts = self.kernel_centers.points
        sq = np.einsum("ij,ij->i", pts, pts)
        kappa = s * np.log(s * s) * (sq @ self._weights)
        return self._offset / s - self._disp_matrix @ c + kappa

    def __call__(self, query):
        return evaluate_tps(self, query)


def _validate_pair(sources: ControlPointSet, targets: ControlPointSet):
    if len(sources) != len(targets):
        raise CountMismatch(f"{len(sources)} sources vs {len(targets)} targets")
    if len(sources) < 3:
        raise DegenerateConfiguration(f"TPS needs at least 3 control points, got {len(sources)}")
    p = sources.points
    diff = p[:, None, :] - p[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(dist, np.inf)
    if dist.min() < DUPLICATE_TOL:
        i, j = np.unravel_index(np.argmin(dist), dist.shape)
        raise DuplicatePoints(f"source points {min(i, j)} and {max(i, j)} coincide")


def system_matrix(p: np.ndarray) -> np.ndarray:
    """The ``(N+3) x (N+3)`` matrix with unknowns ordered ``[C^T; M^T; W]``.

    Rows ``0..N-1`` hold the interpolation conditions ``[1 P K]``; row ``N``
    holds ``sum w_i = 0`` and rows ``N+1, N+2`` hold ``P^T W = 0``.
    """
    n = p.shape[0]
    L = np.zeros((n + 3, n + 3))
    L[:n, 0] = 1.0
    L[:n, 1:3] = p
    L[:n, 3:] = _kernel_matrix(p, p)
    L[n, 3:] = 1.0
    L[n + 1 :, 3:] = p.T
    return L


def solve_tps(
    sources: ControlPointSet, targets: ControlPointSet, *, normalize: bool = True
) -> TpsTransform:
    """Solve the TPS with ``T(sources[i]) = targets[i]``.

    Uses LU with partial pivoting on the full system; a pivot smaller than
    ``PIVOT_TOL`` raises ``DegenerateConfiguration``. ``normalize=False``
    solves directly in pixel coordinates (kept for equivalence checks).
    """
    _validate_pair(sources, targets)
    if normalize:
        norm = frame_normalization(sources.frame_width, sources.frame_height)
    else:
        norm = IDENTITY_NORMALIZATION
    p = norm.forward(sources.points)
    n = p.shape[0]
    rhs = np.zeros((n + 3, 2))
    rhs[:n] = (targets.points - sources.points) * norm.scale

    L = system_matrix(p)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(L, check_finite=False)
    smallest = np.abs(np.diag(lu)).min()
    if not smallest >= PIVOT_TOL:
        raise DegenerateConfiguration(
            f"singular TPS system (pivot {smallest:.3g}); sources collinear or coincident"
        )
    sol = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
    return TpsTransform(
        kernel_centers=sources,
        normalization=norm,
        _offset=sol[0].copy(),
        _disp_matrix=sol[1:3].T.copy(),
        _weights=sol[3:].copy(),
    )


def identity_transform(layout: ControlPointSet) -> TpsTransform:
    n = len(layout)
    return TpsTransform(
        layout,
        frame_normalization(layout.frame_width, layout.frame_height),
        np.zeros(2),
        np.zeros((2, 2)),
        np.zeros((n, 2)),
    )


def tps_displacement(t: TpsTransform, query) -> np.ndarray:
    """``T(p) - p`` for each query point, shape ``(M, 2)``.

    The kernel sum is accumulated center by center with elementwise numpy
    operations, so the result does not depend on how the query is batched.
    """
    query = np.asarray(query, dtype=np.float64).reshape(-1, 2)
    c, s = t.normalization
    qx = (query[:, 0] - c[0]) * s
    qy = (query[:, 1] - c[1]) * s
    m = t._disp_matrix
    dx = t._offset[0] + m[0, 0] * qx + m[0, 1] * qy
    dy = t._offset[1] + m[1, 0] * qx + m[1, 1] * qy
    centers = t.normalized_centers
    for (px, py), (wx, wy) in zip(centers, t._weights):
        if wx == 0.0 and wy == 0.0:
            continue
        ex = qx - px
        ey = qy - py
        k = _kernel_from_sq(ex * ex + ey * ey)
        dx += wx * k
        dy += wy * k
    return np.stack([dx / s, dy / s], axis=-1)


def evaluate_tps(t: TpsTransform, query) -> np.ndarray:
    """Map query points ``(M, 2)`` (or a single ``(2,)`` point) through ``t``."""
    arr = np.asarray(query, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("query points must be finite")
    out = arr.reshape(-1, 2) + tps_displacement(t, arr)
    return out.reshape(arr.shape)


def bending_energy(t: TpsTransform) -> float:
    """``sum_ij (w_i . w_j) O(|p_i - p_j|)`` in normalized units."""
    w = t._weights
    K = _kernel_matrix(t.normalized_centers, t.normalized_centers)
    return float(np.einsum("ik,ij,jk->", w, K, w))
