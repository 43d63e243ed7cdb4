import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from PIL import Image as PILImage

from coupled_tps.errors import BadMagic, DecodeError, ParseError, SchemaError, TruncatedFile, UnsupportedFormat
from coupled_tps.flow import FlowField
from coupled_tps.formats import (
    FLOW_MAGIC,
    decode_flow,
    dumps_points,
    encode_flow,
    loads_points,
    read_flow,
    read_image,
    read_points,
    write_flow,
    write_image,
    write_points,
)
from coupled_tps.layout import boundary_dense_layout
from coupled_tps.tps import ControlPointSet
from coupled_tps.warp import Image


def test_magic_bytes():
    assert FLOW_MAGIC == b"PIEH"
    assert struct.unpack("<f", FLOW_MAGIC)[0] == 202021.25


def test_read_points_document():
    doc = '{"width":512,"height":384,"points":[[0,0],[511,383]]}'
    pts = loads_points(doc)
    assert len(pts) == 2 and (pts.frame_width, pts.frame_height) == (512, 384)
    assert dumps_points(pts) == doc + "\n"


def test_points_canonical_round_trip(tmp_path):
    pts = boundary_dense_layout(8, 10, 512, 384).points
    write_points(tmp_path / "a.json", pts)
    raw = (tmp_path / "a.json").read_bytes()
    again = read_points(tmp_path / "a.json")
    assert again == pts
    write_points(tmp_path / "b.json", again)
    assert (tmp_path / "b.json").read_bytes() == raw


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6)), min_size=1, max_size=20))
def test_points_value_exact_round_trip(coords):
    pts = ControlPointSet(np.array(coords, dtype=float), 640, 480)
    text = dumps_points(pts)
    back = loads_points(text)
    assert np.array_equal(back.points, pts.points + 0.0)
    assert dumps_points(back) == text


@pytest.mark.parametrize("field", ["points", "width", "height"])
def test_missing_field(field):
    doc = {"width": 4, "height": 4, "points": [[0, 0]]}
    del doc[field]
    import json

    with pytest.raises(SchemaError) as info:
        loads_points(json.dumps(doc))
    assert info.value.field == field


def test_parse_error_offset():
    with pytest.raises(ParseError) as info:
        loads_points('{"width": 4, "height": x}')
    assert info.value.offset == 23


def test_bad_point_entries():
    with pytest.raises(SchemaError):
        loads_points('{"width":4,"height":4,"points":[[0,0,1]]}')
    with pytest.raises(SchemaError):
        loads_points('{"width":4,"height":4,"points":[[0,"a"]]}')


def test_zero_flow_file_size(tmp_path):
    write_flow(tmp_path / "z.flo", FlowField.zeros(2, 2))
    data = (tmp_path / "z.flo").read_bytes()
    assert len(data) == 44
    assert data[:4] == b"PIEH" and struct.unpack("<ii", data[4:12]) == (2, 2)


def test_flow_round_trip_bit_exact(tmp_path, rng):
    f = FlowField(rng.normal(0, 10, (7, 9, 2)).astype(np.float32))
    write_flow(tmp_path / "f.flo", f)
    g = read_flow(tmp_path / "f.flo")
    assert g == f
    write_flow(tmp_path / "g.flo", g)
    assert (tmp_path / "g.flo").read_bytes() == (tmp_path / "f.flo").read_bytes()


def test_flow_layout_is_row_major_interleaved():
    vec = np.arange(3 * 2 * 2, dtype=float).reshape(2, 3, 2)
    body = encode_flow(FlowField(vec))[12:]
    assert np.frombuffer(body, "<f4").tolist() == list(range(12))


def test_bad_magic_and_truncation():
    data = encode_flow(FlowField.zeros(2, 2))
    with pytest.raises(BadMagic):
        decode_flow(struct.pack("<f", 0.0) + data[4:])
    with pytest.raises(TruncatedFile):
        decode_flow(data[:-1])
    with pytest.raises(TruncatedFile):
        decode_flow(data[:6])


def test_image_round_trip(tmp_path):
    arr = np.array([[0, 128, 255], [1, 2, 254]], dtype=np.uint8)
    PILImage.fromarray(arr).save(tmp_path / "g.png")
    img = read_image(tmp_path / "g.png")
    assert img.samples[0, 2, 0] == 1.0
    assert img.samples[0, 1, 0] == 128 / 255
    assert img.samples[0, 1, 0] == pytest.approx(0.50196, abs=1e-5)
    write_image(tmp_path / "h.png", img)
    assert np.array_equal(np.asarray(PILImage.open(tmp_path / "h.png")), arr)


def test_rgb_round_trip(tmp_path, rng):
    arr = rng.integers(0, 256, (5, 6, 3), dtype=np.uint8)
    PILImage.fromarray(arr).save(tmp_path / "c.png")
    img = read_image(tmp_path / "c.png")
    assert img.channels == 3
    write_image(tmp_path / "d.png", img)
    assert np.array_equal(np.asarray(PILImage.open(tmp_path / "d.png")), arr)


def test_sixteen_bit_rejected(tmp_path):
    PILImage.fromarray(np.full((4, 4), 40000, dtype=np.uint16)).save(tmp_path / "w.png")
    with pytest.raises(UnsupportedFormat):
        read_image(tmp_path / "w.png")


def test_undecodable(tmp_path):
    (tmp_path / "junk.png").write_bytes(b"not an image")
    with pytest.raises(DecodeError):
        read_image(tmp_path / "junk.png")


def test_write_rounds_half_up(tmp_path):
    write_image(tmp_path / "r.png", Image(np.array([[0.5, 1 / 255], [0.0, 1.0]])))
    assert np.asarray(PILImage.open(tmp_path / "r.png")).tolist() == [[128, 1], [0, 255]]
