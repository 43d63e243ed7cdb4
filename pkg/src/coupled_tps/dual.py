"""Dual transformation between an unlabeled image and its augmentation, and the losses.

For a pair ``(I_a, I_b)`` with predicted source points ``S1`` (on ``I_a``) and
``S2`` (on ``I_b``), each image is warped onto the other: the output that
should match ``I_b`` samples ``I_a`` at ``T_{S2->S1}(G)``, the backward map
sending ``S2`` onto ``S1``; and symmetrically for ``I_b``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CountMismatch, DimensionMismatch
from .flow import PixelGrid, tps_to_flow
from .tps import ControlPointSet, solve_tps
from .warp import Image, backward_warp

GAMMA = 0.9


@dataclass(frozen=True)
class UnlabeledPair:
    image_a: Image
    image_b: Image
    points_a: ControlPointSet
    points_b: ControlPointSet

    def __post_init__(self):
        if self.image_a.samples.shape != self.image_b.samples.shape:
            raise DimensionMismatch("paired images must have identical shapes")
        if len(self.points_a) != len(self.points_b):
            raise CountMismatch(f"{len(self.points_a)} vs {len(self.points_b)} control points")

    def swapped(self) -> UnlabeledPair:
        return UnlabeledPair(self.image_b, self.image_a, self.points_b, self.points_a)


@dataclass(frozen=True)
class LossConfig:
    gamma: float = GAMMA
    iterations: int = 3
    distance: object = "mean_abs"  # name in DISTANCES or a callable

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not callable(self.distance) and self.distance not in DISTANCES:
            raise ValueError(f"unknown distance {self.distance!r}")


def dual_maps(pair: UnlabeledPair):
    """``(T_{S2->S1}, T_{S1->S2})`` as solved TPS transforms."""
    return solve_tps(pair.points_b, pair.points_a), solve_tps(pair.points_a, pair.points_b)


def dual_warp(pair: UnlabeledPair, *, threads: int = 1) -> tuple[Image, Image]:
    """``(I_a(T_{S2->S1}(G)), I_b(T_{S1->S2}(G)))``: each image predicted from the other."""
    b_to_a, a_to_b = dual_maps(pair)
    grid = PixelGrid(pair.image_a.width, pair.image_a.height)
    out_a = backward_warp(pair.image_a, tps_to_flow(b_to_a, grid, threads=threads), threads=threads)
    out_b = backward_warp(pair.image_b, tps_to_flow(a_to_b, grid, threads=threads), threads=threads)
    return out_a, out_b


def _mean_abs(x, y):
    return float(np.mean(np.abs(x - y)))


def _mean_sq(x, y):
    d = x - y
    return float(np.mean(d * d))


DISTANCES = {"mean_abs": _mean_abs, "mean_sq": _mean_sq}


def patch_distance(a: Image, b: Image, kind="mean_abs") -> float:
    """Pixel-space stand-in for the perceptual distance.

    ``kind`` names a built-in distance or is a callable ``(Image, Image) -> float``.
    """
    if a.samples.shape != b.samples.shape:
        raise DimensionMismatch(f"image shapes differ: {a.samples.shape} vs {b.samples.shape}")
    if callable(kind):
        return float(kind(a, b))
    try:
        fn = DISTANCES[kind]
    except KeyError:
        raise ValueError(f"unknown distance {kind!r}") from None
    return fn(a.samples, b.samples)


def labeled_loss(outputs, ground_truth: Image, cfg: LossConfig = LossConfig()) -> float:
    """``sum_t gamma**t * d(outputs[t], ground_truth)``; the first output has weight 1."""
    outputs = list(outputs)
    if len(outputs) != cfg.iterations:
        raise CountMismatch(f"expected {cfg.iterations} outputs, got {len(outputs)}")
    return discounted_sum([patch_distance(o, ground_truth, cfg.distance) for o in outputs], cfg.gamma)


def discounted_sum(distances, gamma: float = GAMMA) -> float:
    total = 0.0
    weight = 1.0
    for d in distances:
        total += weight * d
        weight *= gamma
    return total


def unlabeled_loss(pair: UnlabeledPair, cfg: LossConfig = LossConfig(), *, threads: int = 1) -> float:
    """``d(I_a(T_{S2->S1}(G)), I_b) + d(I_b(T_{S1->S2}(G)), I_a)``."""
    out_a, out_b = dual_warp(pair, threads=threads)
    first = patch_distance(out_a, pair.image_b, cfg.distance)
    second = patch_distance(out_b, pair.image_a, cfg.distance)
    return first + second


def total_loss(labeled: float, unlabeled: float) -> float:
    if not (np.isfinite(labeled) and np.isfinite(unlabeled)) or labeled < 0 or unlabeled < 0:
        raise ValueError("loss terms must be finite and nonnegative")
    return labeled + unlabeled
