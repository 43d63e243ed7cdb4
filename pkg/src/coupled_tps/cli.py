"""Command-line interface.

Every command writes one JSON report (stdout, or ``--report PATH``). The
``runtime`` section holds the raw argv, thread count and elapsed time; every
other field depends only on the inputs.

Exit codes: 0 success, 2 usage / I/O / schema, 3 degenerate control points,
4 predictor failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import formats
from .coupled import compare_coupling_modes, parse_predictor, run_coupled
from .dual import LossConfig, UnlabeledPair, dual_warp, patch_distance
from .errors import DegenerateConfiguration, PredictorFailure, UsageError
from .flow import PixelGrid, resize_flow, tps_to_flow
from .layout import boundary_dense_layout, default_layout, layout_from_points, uniform_layout
from .metrics import compare
from .tps import solve_tps
from .warp import backward_warp

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DEGENERATE = 3
EXIT_PREDICTOR = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _flow_stats(flow):
    mag = flow.magnitude()
    return {"flow_mean": float(mag.mean()), "flow_max": float(mag.max())}


def cmd_grid(args):
    if args.rows < 2 or args.cols < 2:
        raise UsageError("--rows and --cols must be at least 2")
    make = uniform_layout if args.layout == "uniform" else boundary_dense_layout
    layout = make(args.rows, args.cols, args.width, args.height)
    formats.write_points(args.out, layout.points)
    return {"layout": layout.kind, "count": len(layout.points), "out": args.out}


def cmd_warp(args):
    image = formats.read_image(args.image)
    layout_pts = formats.read_points(args.sources)
    predicted = formats.read_points(args.targets)
    if (layout_pts.frame_width, layout_pts.frame_height) != (image.width, image.height):
        raise UsageError(
            f"point frame {layout_pts.frame_width}x{layout_pts.frame_height} "
            f"does not match image {image.width}x{image.height}"
        )
    inverse_map = solve_tps(layout_pts, predicted)
    flow = tps_to_flow(inverse_map, PixelGrid(image.width, image.height), threads=args.threads)
    out = backward_warp(image, flow, threads=args.threads)
    formats.write_image(args.out, out)
    if args.flow:
        formats.write_flow(args.flow, flow)
    return {"out": args.out, "flow": args.flow, "count": len(layout_pts), **_flow_stats(flow)}


def _load_layout(args, image):
    if args.layout_file:
        pts = formats.read_points(args.layout_file)
        if (pts.frame_width, pts.frame_height) != (image.width, image.height):
            raise UsageError("layout frame does not match the image")
        return layout_from_points(pts)
    return default_layout(args.layout_preset, image.width, image.height)


def cmd_iterate(args):
    if args.iters < 1:
        raise UsageError("--iters must be at least 1")
    try:
        spec = parse_predictor(args.predictor)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    image = formats.read_image(args.image)
    reference = formats.read_image(args.reference) if args.reference else None
    if args.compare_iterative and reference is None:
        raise UsageError("--compare-iterative needs --reference")
    layout = _load_layout(args, image)
    result = {"predictor": args.predictor, "iterations": args.iters, "layout_count": len(layout.points)}
    if args.compare_iterative:
        cmp = compare_coupling_modes(
            image, layout, spec, args.iters, reference,
            crop_fraction=args.crop_fraction, threads=args.threads,
        )
        coupled = cmp.coupled_result
        result["comparison"] = {
            "coupled": cmp.coupled.to_dict(),
            "iterative": cmp.iterative.to_dict(),
            "psnr_gain_db": cmp.psnr_gain,
        }
        if args.iterative_out:
            formats.write_image(args.iterative_out, cmp.iterative_image)
    else:
        coupled = run_coupled(
            image, layout, spec, args.iters, reference,
            crop_fraction=args.crop_fraction, threads=args.threads,
        )
    formats.write_image(args.out, coupled.image)
    if args.flow:
        formats.write_flow(args.flow, coupled.flow)
    result["per_iteration"] = coupled.report.to_dict()
    result["final"] = {
        "residual_rotation_deg": coupled.report[-1].residual_rotation,
        "fitted_rotation_deg": coupled.report[-1].fitted_rotation,
        **_flow_stats(coupled.flow),
    }
    if coupled.report[-1].metrics is not None:
        result["final"].update(coupled.report[-1].metrics.to_dict())
    result["out"] = args.out
    return result


def cmd_dual(args):
    image_a = formats.read_image(args.image_a)
    image_b = formats.read_image(args.image_b)
    pair = UnlabeledPair(image_a, image_b, formats.read_points(args.points_a), formats.read_points(args.points_b))
    cfg = LossConfig(distance=args.distance)
    out_a, out_b = dual_warp(pair, threads=args.threads)
    first = patch_distance(out_a, image_b, cfg.distance)
    second = patch_distance(out_b, image_a, cfg.distance)
    if args.out_a:
        formats.write_image(args.out_a, out_a)
    if args.out_b:
        formats.write_image(args.out_b, out_b)
    return {"distance": cfg.distance, "term_a_to_b": first, "term_b_to_a": second, "unlabeled_loss": first + second}


def cmd_metrics(args):
    ref = formats.read_image(args.ref)
    test = formats.read_image(args.test)
    return compare(test, ref).to_dict()


def cmd_resize_flow(args):
    flow = formats.read_flow(args.input)
    out = resize_flow(flow, args.width, args.height)
    formats.write_flow(args.out, out)
    return {"from": [flow.width, flow.height], "to": [out.width, out.height], "out": args.out}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker threads (never changes results)")
    common.add_argument("--report", help="write the JSON report here instead of stdout")

    parser = _Parser(prog="coupled-tps", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("grid", parents=[common], help="write a target control-point layout")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=384)
    p.add_argument("--layout", choices=["uniform", "chebyshev"], default="uniform")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("warp", parents=[common], help="single TPS warp from two point files")
    p.add_argument("--image", required=True)
    p.add_argument("--sources", required=True, help="fixed layout points (output frame)")
    p.add_argument("--targets", required=True, help="predicted points (input frame)")
    p.add_argument("--out", required=True)
    p.add_argument("--flow")
    p.set_defaults(func=cmd_warp)

    p = sub.add_parser("iterate", parents=[common], help="run the coupled iteration loop")
    p.add_argument("--image", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--layout-file")
    g.add_argument("--layout-preset", choices=["uniform", "chebyshev"], default="uniform")
    p.add_argument("--predictor", default="identity")
    p.add_argument("--iters", type=int, default=3)
    p.add_argument("--reference")
    p.add_argument("--compare-iterative", action="store_true")
    p.add_argument("--crop-fraction", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.add_argument("--flow")
    p.add_argument("--iterative-out")
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("dual", parents=[common], help="dual transformation of an image pair")
    p.add_argument("--image-a", required=True)
    p.add_argument("--image-b", required=True)
    p.add_argument("--points-a", required=True)
    p.add_argument("--points-b", required=True)
    p.add_argument("--distance", choices=["mean_abs", "mean_sq"], default="mean_abs")
    p.add_argument("--out-a")
    p.add_argument("--out-b")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("metrics", parents=[common], help="PSNR / SSIM of two images")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("resize-flow", parents=[common], help="resample a flow file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_resize_flow)
    return parser


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads < 1:
        print("coupled-tps: error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE

    started = time.perf_counter()
    status, error, result = EXIT_OK, None, None
    try:
        result = args.func(args)
    except DegenerateConfiguration as exc:
        status, error = EXIT_DEGENERATE, str(exc)
    except PredictorFailure as exc:
        status, error = EXIT_PREDICTOR, str(exc)
    except (UsageError, OSError) as exc:
        status, error = EXIT_USAGE, str(exc)

    report = {"command": args.command, "status": status}
    if error is not None:
        report["error"] = error
        print(f"coupled-tps {args.command}: {error}", file=sys.stderr)
    if result is not None:
        report["result"] = result
    report["runtime"] = {
        "argv": argv,
        "threads": args.threads,
        "elapsed_ms": round((time.perf_counter() - started) * 1000.0, 3),
    }
    text = json.dumps(report, indent=2, default=_json_default) + "\n"
    if args.report:
        try:
            with open(args.report, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"coupled-tps: cannot write report: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
