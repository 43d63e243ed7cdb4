"""Coupled thin-plate-spline warping.

Exact TPS solving from control points, dense backward warping flows, coupling
of several TPS warps into one flow so the image is interpolated only once,
and the dual-transformation consistency used for unlabeled image pairs.
"""

from .coupled import (
    CoupledResult,
    FilePredictor,
    IdentityPredictor,
    IterationReport,
    PredictorSpec,
    RotationOracle,
    compare_coupling_modes,
    estimate_rotation,
    parse_predictor,
    run_coupled,
    run_iterative,
)
from .dual import (
    LossConfig,
    UnlabeledPair,
    dual_warp,
    labeled_loss,
    patch_distance,
    total_loss,
    unlabeled_loss,
)
from .errors import (
    BadMagic,
    CountMismatch,
    CoupledTPSError,
    DecodeError,
    DegenerateConfiguration,
    DimensionMismatch,
    DuplicatePoints,
    InvalidDimensions,
    ParseError,
    PredictorFailure,
    SchemaError,
    TooSmall,
    TruncatedFile,
    UnsupportedFormat,
)
from .flow import (
    FlowField,
    PixelGrid,
    compose_flows,
    make_grid,
    resize_flow,
    rotation_flow,
    sample_flow,
    tps_to_flow,
)
from .formats import read_flow, read_image, read_points, write_flow, write_image, write_points
from .layout import ControlLayout, boundary_dense_layout, default_layout, uniform_layout
from .metrics import MetricReport, compare, psnr, ssim
from .tps import ControlPointSet, TpsTransform, bending_energy, evaluate_tps, radial_kernel, solve_tps
from .warp import Image, backward_warp, bilinear_sample, iterative_warp_step

__version__ = "0.1.0"
