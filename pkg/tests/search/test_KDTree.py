# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for :class:`stabilab.search.KDTree`."""

from __future__ import annotations

import numpy as np
import pytest

from stabilab.common import InputError
from stabilab.search import KDTree

MINIMA = np.array([[0.5, 0.5], [0.5, -0.5], [-0.5, 0.5], [-0.5, -0.5]])


def test_serialization():
    """Test string and representation serialization."""
    kdtree = KDTree(MINIMA)
    expected = "KDTree(n_points=4, dimension=2)"
    assert repr(kdtree) == expected
    assert str(kdtree) == expected


def test_points():
    """Test registered points are copied out."""
    kdtree = KDTree(MINIMA)
    points = kdtree.points
    np.testing.assert_array_equal(points, MINIMA)
    points[0] = 0.0
    np.testing.assert_array_equal(kdtree.points, MINIMA)


def test_single_point():
    """Test a single query point."""
    distance, index = KDTree(MINIMA).query([0.4, -0.4])
    assert index.tolist() == [1]
    np.testing.assert_allclose(distance, [np.sqrt(0.02)])


def test_many_points(rng):
    """Test nearest neighbours agree with a brute force search."""
    points = rng.uniform(-1, 1, size=(200, 3))
    queries = rng.uniform(-1, 1, size=(50, 3))
    distance, index = KDTree(points, leaf_size=4).query(queries)
    brute = np.linalg.norm(queries[:, None, :] - points[None, :, :], axis=2)
    np.testing.assert_array_equal(index, np.argmin(brute, axis=1))
    np.testing.assert_allclose(distance, np.min(brute, axis=1), rtol=1e-12)


def test_empty_fail():
    """Test trap of no registered points."""
    with pytest.raises(InputError, match="non-empty"):
        _ = KDTree(np.empty((0, 2)))


def test_dimension_fail():
    """Test trap of a query of the wrong dimension."""
    with pytest.raises(InputError, match="dimension 2, got 3"):
        _ = KDTree(MINIMA).query([0.0, 0.0, 0.0])
