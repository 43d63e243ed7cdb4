import math

import numpy as np
import pytest

from coupled_tps.errors import InvalidDimensions
from coupled_tps.layout import boundary_dense_layout, default_layout, lobatto_nodes, uniform_layout


def test_uniform_corners():
    lay = uniform_layout(2, 2, 512, 384)
    assert lay.points.points.tolist() == [[0, 0], [511, 0], [0, 383], [511, 383]]


def test_uniform_63_point_preset():
    lay = default_layout("uniform")
    assert (lay.rows, lay.cols, len(lay.points)) == (7, 9, 63)
    xs = np.unique(lay.points.points[:, 0])
    np.testing.assert_allclose(np.diff(xs), 63.875, atol=1e-12)
    assert lay.points.points[-1].tolist() == [511, 383]


def test_uniform_small_frame_integer_lattice():
    lay = uniform_layout(3, 3, 3, 3)
    assert lay.points.points.tolist() == [[x, y] for y in range(3) for x in range(3)]


def test_row_major_order():
    p = uniform_layout(3, 4, 31, 21).points.points
    assert p[1, 1] == 0 and p[4, 0] == 0 and p[4, 1] == 10


def test_boundary_dense_two_by_two_equals_uniform():
    a = boundary_dense_layout(2, 2, 512, 384).points
    assert a == uniform_layout(2, 2, 512, 384).points


def test_boundary_dense_midpoint():
    p = boundary_dense_layout(3, 3, 101, 101).points.points
    assert p[4].tolist() == [50, 50]


def test_boundary_dense_portrait_preset():
    lay = default_layout("chebyshev")
    assert len(lay.points) == 80
    xs = np.unique(lay.points.points[:, 0])
    assert xs[1] == pytest.approx(511 * (1 - math.cos(math.pi / 9)) / 2, abs=1e-9)
    assert xs[1] == pytest.approx(15.41, abs=5e-3)
    assert xs[1] < 511 / 9


def test_lobatto_symmetric_and_clustered():
    u = lobatto_nodes(9)
    np.testing.assert_array_equal(u + u[::-1], 1.0)
    gaps = np.diff(u)
    assert gaps[0] < gaps[len(gaps) // 2]


@pytest.mark.parametrize("fn", [uniform_layout, boundary_dense_layout])
def test_invalid(fn):
    with pytest.raises(InvalidDimensions):
        fn(1, 5, 100, 100)
