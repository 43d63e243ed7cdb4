"""File formats: control-point JSON, binary flow files, 8-bit images.

Flow files use the common dense-flow layout: the float32 magic ``202021.25``
(bytes ``PIEH``), int32 width, int32 height, then row-major interleaved
``(u, v)`` float32 pairs, all little-endian.
"""

from __future__ import annotations

import json
import math
import struct
from pathlib import Path

import numpy as np

from .errors import BadMagic, DecodeError, FormatError, ParseError, SchemaError, TruncatedFile, UnsupportedFormat
from .flow import FlowField
from .tps import ControlPointSet
from .warp import Image

FLOW_MAGIC = struct.pack("<f", 202021.25)
_HEADER = struct.Struct("<4sii")


# -- control points -----------------------------------------------------------


def _format_number(v: float) -> str:
    if v.is_integer() and abs(v) < 2**53:
        return str(int(v))
    return repr(v)


def dumps_points(points: ControlPointSet) -> str:
    """Canonical document: compact, keys in fixed order, shortest round-trip decimals."""
    pairs = ",".join(
        f"[{_format_number(float(x))},{_format_number(float(y))}]" for x, y in points.points
    )
    return f'{{"width":{points.frame_width},"height":{points.frame_height},"points":[{pairs}]}}\n'


def loads_points(data) -> ControlPointSet:
    if isinstance(data, str):
        raw = data.encode("utf-8")
    else:
        raw = bytes(data)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError("invalid UTF-8", exc.start) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, len(text[: exc.pos].encode("utf-8"))) from None
    if not isinstance(doc, dict):
        raise SchemaError("<root>", "control-point document must be a JSON object")
    for key in ("width", "height"):
        if key not in doc:
            raise SchemaError(key)
        if not isinstance(doc[key], int) or isinstance(doc[key], bool):
            raise SchemaError(key, f"{key!r} must be an integer")
    if "points" not in doc:
        raise SchemaError("points")
    pts = doc["points"]
    if not isinstance(pts, list):
        raise SchemaError("points", "'points' must be an array of [x, y] pairs")
    for i, p in enumerate(pts):
        ok = (
            isinstance(p, list)
            and len(p) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in p)
        )
        if not ok or not all(math.isfinite(v) for v in p):
            raise SchemaError("points", f"points[{i}] is not a finite [x, y] pair")
    try:
        return ControlPointSet(np.array(pts, dtype=np.float64).reshape(-1, 2), doc["width"], doc["height"])
    except ValueError as exc:
        raise SchemaError("width/height", str(exc)) from None


def read_points(path) -> ControlPointSet:
    return loads_points(Path(path).read_bytes())


def write_points(path, points: ControlPointSet) -> None:
    Path(path).write_bytes(dumps_points(points).encode("utf-8"))


# -- flows --------------------------------------------------------------------


def encode_flow(f: FlowField) -> bytes:
    body = np.ascontiguousarray(f.vectors, dtype="<f4").tobytes()
    return _HEADER.pack(FLOW_MAGIC, f.width, f.height) + body


def decode_flow(data: bytes) -> FlowField:
    if len(data) < _HEADER.size:
        raise TruncatedFile(f"flow file has {len(data)} bytes, header needs {_HEADER.size}")
    magic, width, height = _HEADER.unpack_from(data)
    if magic != FLOW_MAGIC:
        raise BadMagic(f"bad flow magic {magic!r}, expected {FLOW_MAGIC!r}")
    if width < 2 or height < 2:
        raise FormatError(f"flow dimensions {width}x{height} are below 2x2")
    expected = _HEADER.size + width * height * 2 * 4
    if len(data) < expected:
        raise TruncatedFile(f"flow file has {len(data)} bytes, expected {expected}")
    if len(data) > expected:
        raise FormatError(f"flow file has {len(data) - expected} trailing bytes")
    vec = np.frombuffer(data, dtype="<f4", offset=_HEADER.size).reshape(height, width, 2)
    return FlowField(vec.astype(np.float64))


def read_flow(path) -> FlowField:
    return decode_flow(Path(path).read_bytes())


def write_flow(path, f: FlowField) -> None:
    """Write ``f`` as float32; float64 vectors are rounded to nearest float32."""
    Path(path).write_bytes(encode_flow(f))


# -- images -------------------------------------------------------------------


def read_image(path) -> Image:
    """Read an 8-bit grayscale or RGB raster; intensities become ``value / 255``."""
    from PIL import Image as PILImage, UnidentifiedImageError

    try:
        with PILImage.open(path) as im:
            mode = im.mode
            if mode not in ("L", "RGB"):
                raise UnsupportedFormat(f"{path}: mode {mode!r} is not 8-bit grayscale or RGB")
            arr = np.asarray(im)
    except (UnidentifiedImageError, OSError) as exc:
        raise DecodeError(f"{path}: {exc}") from None
    if arr.dtype != np.uint8:
        raise UnsupportedFormat(f"{path}: sample type {arr.dtype} is not 8-bit")
    return Image(arr.astype(np.float64) / 255.0)


def to_uint8(img: Image) -> np.ndarray:
    return np.clip(np.floor(img.samples * 255.0 + 0.5), 0, 255).astype(np.uint8)


def write_image(path, img: Image) -> None:
    """Write as 8-bit (``round(v * 255)``); the container follows the file suffix."""
    from PIL import Image as PILImage

    arr = to_uint8(img)
    pil = PILImage.fromarray(arr[..., 0] if img.channels == 1 else arr)
    try:
        pil.save(path)
    except (KeyError, ValueError) as exc:
        raise UnsupportedFormat(f"{path}: cannot infer an image format ({exc})") from None
