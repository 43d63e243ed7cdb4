"""The coupled iteration loop.

Each iteration asks a predictor for new source control points, solves the
backward map from the fixed layout to those points, converts it to a flow and
couples it onto the accumulated flow. The input image is interpolated once,
at the end, with the coupled flow. ``run_iterative`` is the re-interpolating
baseline kept for comparison.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional, Protocol

import numpy as np

from . import warp as _warp
from .errors import PredictorFailure
from .flow import FlowField, PixelGrid, compose_flows, rotation_matrix, tps_to_flow
from .layout import ControlLayout
from .metrics import MetricReport, psnr, ssim
from .tps import ControlPointSet, solve_tps
from .warp import Image

DEFAULT_INFERENCE_ITERS = 3
DEFAULT_TRAINING_ITERS = 4


# -- predictors ---------------------------------------------------------------


class Predictor(Protocol):
    """Stand-in for the control-point regression network.

    ``uses_image`` tells the loop whether to render the currently warped image
    before calling ``predict``; predictors that ignore it save an interpolation.
    """

    uses_image: bool
    initial_angle: Optional[float]

    def predict(self, iteration: int, image: Optional[Image], layout: ControlLayout) -> np.ndarray: ...


class IdentityPredictor:
    uses_image = False
    initial_angle = None

    def predict(self, iteration, image, layout):
        return layout.points.points.copy()


class RotationOracle:
    """Predicts the layout rotated about the frame center.

    With ``steps`` the per-iteration rotations are given explicitly; otherwise
    each iteration removes ``gain`` times the remaining tilt, so the tilt left
    after ``i`` iterations is ``initial_angle * (1 - gain)**i``.
    """

    uses_image = False

    def __init__(self, initial_angle: float, gain: float = 1.0, steps=None):
        if steps is None and not 0.0 < gain <= 1.0:
            raise ValueError(f"gain must lie in (0, 1], got {gain}")
        self.initial_angle = float(initial_angle)
        self.gain = float(gain)
        self.steps = None if steps is None else [float(s) for s in steps]
        self.residual = self.initial_angle

    def predict(self, iteration, image, layout):
        if self.steps is not None:
            if iteration >= len(self.steps):
                raise PredictorFailure(f"rotation schedule has only {len(self.steps)} steps")
            angle = self.steps[iteration]
        else:
            angle = self.gain * self.residual
        self.residual -= angle
        pts = layout.points.points
        c = PixelGrid(layout.width, layout.height).center
        return (pts - c) @ rotation_matrix(angle).T + c


class FilePredictor:
    """Replays ``iter_0.json, iter_1.json, ...`` from a directory."""

    uses_image = False
    initial_angle = None

    def __init__(self, directory):
        self.directory = Path(directory)

    def predict(self, iteration, image, layout):
        from .formats import read_points

        path = self.directory / f"iter_{iteration}.json"
        if not path.is_file():
            raise PredictorFailure(f"no recorded point set for iteration {iteration}: {path}")
        pts = read_points(path)
        if len(pts) != len(layout.points):
            raise PredictorFailure(
                f"{path} has {len(pts)} points but the layout has {len(layout.points)}"
            )
        return pts.points.copy()


@dataclass(frozen=True)
class PredictorSpec:
    kind: str  # identity | rotation_oracle | file
    initial_angle: float = 0.0
    gain: float = 1.0
    steps: Optional[tuple] = None
    directory: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("identity", "rotation_oracle", "file"):
            raise ValueError(f"unknown predictor kind {self.kind!r}")
        if self.kind == "rotation_oracle" and self.steps is None and not 0.0 < self.gain <= 1.0:
            raise ValueError(f"gain must lie in (0, 1], got {self.gain}")
        if self.kind == "file" and not self.directory:
            raise ValueError("file predictor needs a directory")

    def build(self) -> Predictor:
        if self.kind == "identity":
            return IdentityPredictor()
        if self.kind == "rotation_oracle":
            return RotationOracle(self.initial_angle, self.gain, self.steps)
        return FilePredictor(self.directory)


def parse_predictor(text: str) -> PredictorSpec:
    """Parse ``identity``, ``file:DIR`` or ``rotation-oracle:angle=A,gain=G[,steps=a/b/c]``."""
    text = text.strip()
    if text == "identity":
        return PredictorSpec("identity")
    if text.startswith("file:"):
        return PredictorSpec("file", directory=text[len("file:") :])
    m = re.fullmatch(r"rotation[-_]oracle(?::(.*))?", text)
    if not m:
        raise ValueError(f"cannot parse predictor {text!r}")
    params = {}
    for item in filter(None, (m.group(1) or "").split(",")):
        key, _, value = item.partition("=")
        params[key.strip()] = value.strip()
    unknown = set(params) - {"angle", "gain", "steps"}
    if unknown:
        raise ValueError(f"unknown rotation-oracle parameters: {sorted(unknown)}")
    steps = None
    if "steps" in params:
        steps = tuple(float(s) for s in params["steps"].split("/"))
    if "angle" in params:
        angle = float(params["angle"])
    elif steps is not None:
        angle = sum(steps)
    else:
        raise ValueError("rotation-oracle needs angle=")
    return PredictorSpec("rotation_oracle", angle, float(params.get("gain", 1.0)), steps)


def _as_predictor(predictor) -> Predictor:
    if isinstance(predictor, PredictorSpec):
        return predictor.build()
    if isinstance(predictor, str):
        return parse_predictor(predictor).build()
    return predictor


# -- diagnostics --------------------------------------------------------------


def estimate_rotation(f: FlowField) -> float:
    """Least-squares rotation about the frame center explaining ``f``, in degrees.

    Minimizes ``sum |(R - I) d - f|^2`` with ``d = x - c``; the optimum is
    ``atan2(sum d x g, sum d . g)`` where ``g = d + f``.
    """
    grid = f.grid
    c = grid.center
    xs, ys = grid.mesh()
    dx, dy = xs - c[0], ys - c[1]
    gx = dx + f.vectors[..., 0]
    gy = dy + f.vectors[..., 1]
    cross = float(np.sum(dx * gy - dy * gx))
    dot = float(np.sum(dx * gx + dy * gy))
    return math.degrees(math.atan2(cross, dot))


@dataclass
class IterationRecord:
    iteration: int
    source_points: np.ndarray
    flow_mean: float
    flow_max: float
    fitted_rotation: float
    residual_rotation: Optional[float] = None
    metrics: Optional[MetricReport] = None

    def to_dict(self):
        out = {
            "iteration": self.iteration,
            "source_points": self.source_points.tolist(),
            "flow_mean": self.flow_mean,
            "flow_max": self.flow_max,
            "fitted_rotation_deg": self.fitted_rotation,
            "residual_rotation_deg": self.residual_rotation,
        }
        if self.metrics is not None:
            out.update(self.metrics.to_dict())
        return out


@dataclass
class IterationReport:
    entries: list = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i) -> IterationRecord:
        return self.entries[i]

    @property
    def predictions(self) -> list:
        return [e.source_points for e in self.entries]

    def to_dict(self):
        return [e.to_dict() for e in self.entries]


class CoupledResult(NamedTuple):
    flow: FlowField
    image: Image
    report: IterationReport


def _record(i, points, flow, predictor):
    mag = flow.magnitude()
    fitted = estimate_rotation(flow)
    residual = None
    if predictor.initial_angle is not None:
        residual = predictor.initial_angle - fitted
    return IterationRecord(i, points, float(mag.mean()), float(mag.max()), fitted, residual)


def centered_crop(img: Image, fraction: float) -> Image:
    if fraction >= 1.0:
        return img
    h, w = img.height, img.width
    ch, cw = max(2, round(h * fraction)), max(2, round(w * fraction))
    y0, x0 = (h - ch) // 2, (w - cw) // 2
    return Image(img.samples[y0 : y0 + ch, x0 : x0 + cw])


def cropped_metrics(test: Image, reference: Image, crop_fraction: float = 1.0) -> MetricReport:
    a, b = centered_crop(test, crop_fraction), centered_crop(reference, crop_fraction)
    return MetricReport(psnr(a, b), ssim(a, b))


# -- the two regimes ----------------------------------------------------------


def _solve_inverse_map(layout: ControlLayout, predicted: np.ndarray):
    sources = ControlPointSet(predicted, layout.width, layout.height)
    return solve_tps(layout.points, sources)


def run_coupled(
    input: Image,
    layout: ControlLayout,
    predictor,
    iterations: int = DEFAULT_INFERENCE_ITERS,
    reference: Optional[Image] = None,
    *,
    crop_fraction: float = 1.0,
    threads: int = 1,
) -> CoupledResult:
    """Run the coupled loop and interpolate ``input`` once with the final flow.

    When ``reference`` is given, each iteration's image ``I_0(G + F_i)`` is
    rendered (one interpolation from ``input`` each) for the report's metrics.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if (input.width, input.height) != (layout.width, layout.height):
        raise ValueError(
            f"layout frame {layout.width}x{layout.height} does not match image {input.width}x{input.height}"
        )
    predictor = _as_predictor(predictor)
    grid = PixelGrid(input.width, input.height)
    flow = FlowField.zeros(grid.width, grid.height)
    report = IterationReport()
    current = None
    for i in range(iterations):
        if predictor.uses_image:
            current = input if i == 0 else _warp.backward_warp(input, flow, threads=threads)
        predicted = np.asarray(predictor.predict(i, current, layout), dtype=np.float64)
        inverse_map = _solve_inverse_map(layout, predicted)
        delta = tps_to_flow(inverse_map, grid, threads=threads)
        flow = compose_flows(flow, delta, threads=threads)
        rendered = None
        if reference is not None and i < iterations - 1:
            rendered = _warp.backward_warp(input, flow, threads=threads)
        report.entries.append(_record(i, predicted, flow, predictor))
        if rendered is not None:
            report.entries[-1].metrics = cropped_metrics(rendered, reference, crop_fraction)
    output = _warp.backward_warp(input, flow, threads=threads)
    if reference is not None:
        report.entries[-1].metrics = cropped_metrics(output, reference, crop_fraction)
    return CoupledResult(flow, output, report)


def run_iterative(
    input: Image,
    layout: ControlLayout,
    predictions,
    reference: Optional[Image] = None,
    *,
    crop_fraction: float = 1.0,
    threads: int = 1,
) -> tuple[Image, list]:
    """Re-interpolate the previous output once per recorded prediction."""
    image = input
    metrics = []
    for predicted in predictions:
        inverse_map = _solve_inverse_map(layout, np.asarray(predicted, dtype=np.float64))
        image = _warp.iterative_warp_step(image, inverse_map, threads=threads)
        if reference is not None:
            metrics.append(cropped_metrics(image, reference, crop_fraction))
    return image, metrics


@dataclass
class ComparisonReport:
    coupled: MetricReport
    iterative: MetricReport
    coupled_result: CoupledResult
    iterative_image: Image
    iterative_metrics: list

    @property
    def psnr_gain(self) -> float:
        return self.coupled.psnr - self.iterative.psnr

    def to_dict(self):
        return {
            "coupled": self.coupled.to_dict(),
            "iterative": self.iterative.to_dict(),
            "iterations": self.coupled_result.report.to_dict(),
        }


def compare_coupling_modes(
    input: Image,
    layout: ControlLayout,
    predictor,
    iterations: int,
    reference: Image,
    *,
    crop_fraction: float = 1.0,
    threads: int = 1,
) -> ComparisonReport:
    """Run both regimes on the same predictions and score each against ``reference``."""
    result = run_coupled(
        input, layout, predictor, iterations, reference, crop_fraction=crop_fraction, threads=threads
    )
    iter_image, iter_metrics = run_iterative(
        input, layout, result.report.predictions, reference, crop_fraction=crop_fraction, threads=threads
    )
    return ComparisonReport(
        coupled=result.report[-1].metrics,
        iterative=iter_metrics[-1],
        coupled_result=result,
        iterative_image=iter_image,
        iterative_metrics=iter_metrics,
    )
