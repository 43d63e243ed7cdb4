import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coupled_tps.errors import DimensionMismatch
from coupled_tps.flow import FlowField, PixelGrid, affine_flow, compose_flows
from coupled_tps.tps import ControlPointSet, solve_tps
from coupled_tps.warp import Image, backward_warp, bilinear_sample, iterative_warp_step


def ramp(w=8, h=3):
    xs = np.tile(np.arange(w) / (w - 1), (h, 1))
    return Image(xs)


def translation_map(w, h, dx, dy):
    lay = ControlPointSet([(0, 0), (w - 1, 0), (0, h - 1), (w - 1, h - 1)], w, h)
    return solve_tps(lay, lay.with_points(lay.points + [dx, dy]))


def test_image_validation():
    with pytest.raises(ValueError):
        Image(np.full((4, 4), 1.5))
    with pytest.raises(ValueError):
        Image(np.zeros((4, 4, 2)))
    assert Image(np.zeros((3, 4))).channels == 1


def test_bilinear_sample_basics():
    img = Image(np.array([[0.2, 0.6, 0.6], [0.2, 0.6, 0.6]]))
    assert bilinear_sample(img, (1, 0)).tolist() == [0.6]
    assert bilinear_sample(img, (-1, 0)).tolist() == [0.0]
    assert bilinear_sample(img, (0.5, 0)) == pytest.approx([0.4], abs=1e-15)
    assert bilinear_sample(img, (2.0001, 0)).tolist() == [0.0]


def test_zero_flow_is_bit_exact_identity(rng):
    img = Image(rng.uniform(size=(13, 17, 3)))
    assert backward_warp(img, FlowField.zeros(17, 13)) == img


def test_integer_shift_on_ramp():
    img = ramp()
    out = backward_warp(img, FlowField.constant(8, 3, 1, 0)).samples[..., 0]
    np.testing.assert_allclose(out[:, :7], np.tile((np.arange(7) + 1) / 7, (3, 1)), atol=1e-15)
    np.testing.assert_array_equal(out[:, 7], 0)


def test_half_pixel_shift_on_ramp():
    out = backward_warp(ramp(), FlowField.constant(8, 3, 0.5, 0)).samples[..., 0]
    np.testing.assert_allclose(out[:, :7], np.tile((np.arange(7) + 0.5) / 7, (3, 1)), atol=1e-15)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        backward_warp(ramp(), FlowField.zeros(5, 3))


def test_iterative_step_identity_and_translation(rng):
    img = Image(rng.uniform(size=(10, 12)))
    lay = ControlPointSet([(0, 0), (11, 0), (0, 9), (11, 9)], 12, 10)
    assert iterative_warp_step(img, solve_tps(lay, lay)) == img
    out = iterative_warp_step(img, translation_map(12, 10, 2, 1)).samples
    np.testing.assert_allclose(out[:-1, :-2], img.samples[1:, 2:], atol=1e-9)
    np.testing.assert_allclose(out[-1:], 0, atol=1e-9)
    np.testing.assert_allclose(out[:, -2:], 0, atol=1e-9)


def test_checkerboard_half_steps_blur_but_coupled_is_exact():
    board = Image(np.indices((4, 4)).sum(axis=0) % 2)
    half = translation_map(4, 4, 0.5, 0)
    iterative = iterative_warp_step(iterative_warp_step(board, half), half).samples[..., 0]
    # hand computation: 0.5 where both taps are inside, 0.25 at x=2, 0 at x=3
    np.testing.assert_allclose(iterative, np.tile([0.5, 0.5, 0.25, 0.0], (4, 1)), atol=1e-9)

    f = compose_flows(FlowField.constant(4, 4, 0.5, 0), FlowField.constant(4, 4, 0.5, 0))
    coupled = backward_warp(board, f).samples[..., 0]
    expected = np.zeros((4, 4))
    expected[:, :3] = board.samples[:, 1:, 0]
    np.testing.assert_array_equal(coupled, expected)


def test_linear_image_exactness(rng):
    w, h = 30, 20
    xs, ys = PixelGrid(w, h).mesh()
    img = Image(0.1 + 0.02 * xs + 0.015 * ys)
    A = np.array([[0.97, 0.03], [-0.02, 1.01]]); off = np.array([0.6, 0.3])
    out = backward_warp(img, affine_flow(w, h, A, off)).samples[..., 0]
    px = A[0, 0] * xs + A[0, 1] * ys + off[0]
    py = A[1, 0] * xs + A[1, 1] * ys + off[1]
    inside = (px >= 0) & (px <= w - 1) & (py >= 0) & (py <= h - 1)
    np.testing.assert_allclose(out[inside], (0.1 + 0.02 * px + 0.015 * py)[inside], atol=1e-6)


def test_threads_bit_identical(rng):
    img = Image(rng.uniform(size=(90, 40, 3)))
    f = FlowField(rng.normal(0, 4, (90, 40, 2)))
    ref = backward_warp(img, f)
    assert backward_warp(img, f, threads=4) == ref
    assert backward_warp(img, f, threads=16) == ref


def test_coupled_equals_iterative_for_integer_translations(rng):
    w, h = 24, 18
    img = Image(rng.uniform(size=(h, w)))
    shifts = [(1, 0), (2, -1), (-1, 2)]
    it = img
    f = FlowField.zeros(w, h)
    for s in shifts:
        d = FlowField.constant(w, h, *s)
        it = backward_warp(it, d)
        f = compose_flows(f, d)
    coupled = backward_warp(img, f)
    total = np.sum(shifts, axis=0)
    xs, ys = PixelGrid(w, h).mesh()
    mask = np.ones((h, w), bool)
    acc = np.zeros(2)
    for s in reversed(shifts):
        acc = acc + s
        mask &= (xs + acc[0] >= 0) & (xs + acc[0] <= w - 1) & (ys + acc[1] >= 0) & (ys + acc[1] <= h - 1)
    assert mask.sum() > 100
    np.testing.assert_array_equal(coupled.samples[mask], it.samples[mask])
    np.testing.assert_array_equal(f.vectors[mask][:, 0], total[0])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), scale=st.floats(0, 20))
def test_range_preservation(seed, scale):
    rng = np.random.default_rng(seed)
    img = Image(rng.uniform(size=(9, 11, 3)))
    out = backward_warp(img, FlowField(rng.normal(0, scale, (9, 11, 2))))
    assert out.samples.min() >= 0.0 and out.samples.max() <= 1.0
