# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for the GD and SGD optimization error bounds."""

from __future__ import annotations

import math

import pytest

from stabilab.bounds import gd_opt_bound, sgd_opt_bound
from stabilab.common import InputError


def test_gd(c):
    """Test the GD optimization error bound."""
    assert gd_opt_bound(c.replace(D=2.0), 10) == 0.2
    assert gd_opt_bound(c.replace(L1=4.0), 8) == 0.25


def test_gd_fail(c):
    """Test trap of zero steps."""
    with pytest.raises(InputError, match="at least one step"):
        _ = gd_opt_bound(c, 0)


def test_sgd(c):
    """Test the SGD terminal iterate bound."""
    assert sgd_opt_bound(c.replace(D=2.0), 0) == pytest.approx(3.0)
    expected = 1.5 * (1 + math.log(100)) / 10
    assert sgd_opt_bound(c, 99) == pytest.approx(expected)


def test_sgd_decreasing(c):
    """Test the SGD bound decreases once log(t + 1) exceeds one."""
    values = [sgd_opt_bound(c, t) for t in range(10, 1000, 10)]
    assert all(a > b for a, b in zip(values, values[1:], strict=False))


def test_sgd_fail(c):
    """Test trap of a negative step."""
    with pytest.raises(InputError, match="non-negative step"):
        _ = sgd_opt_bound(c, -1)
