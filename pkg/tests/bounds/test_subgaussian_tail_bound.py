# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for :func:`stabilab.bounds.subgaussian_tail_bound`."""

from __future__ import annotations

import math

import pytest

from stabilab.bounds import TailKind, subgaussian_tail_bound
from stabilab.common import InputError


def test_gradient_inner(c):
    """Test the inner product tail bound."""
    result = subgaussian_tail_bound(c, 400, 3, 0.5)
    assert result == pytest.approx(2 * math.exp(-6.25))


def test_hessian(c):
    """Test the matrix tail bound scales with the dimension."""
    result = subgaussian_tail_bound(c.replace(L1=2.0), 400, 3, 0.5, TailKind.HESSIAN)
    assert result == pytest.approx(6 * math.exp(-400 * 0.25 / 64))


def test_clamp(c):
    """Test the bound is clamped to one unless asked otherwise."""
    assert subgaussian_tail_bound(c, 0, 3, 0.5) == 1.0
    assert subgaussian_tail_bound(c, 0, 3, 0.5, clamp=False) == 2.0
    assert subgaussian_tail_bound(c, 0, 3, 0.5, "hessian", clamp=False) == 6.0


def test_vanishing_constant(c):
    """Test a constant loss has no deviation."""
    assert subgaussian_tail_bound(c.replace(L0=0.0), 10, 3, 0.5) == 0.0


def test_decreasing(c):
    """Test the bound decreases with the sample size."""
    values = [
        subgaussian_tail_bound(c, n, 3, 0.5, clamp=False) for n in range(0, 500, 50)
    ]
    assert all(a > b for a, b in zip(values, values[1:], strict=False))


def test_fail(c):
    """Test trap of a non-positive deviation."""
    with pytest.raises(InputError, match="positive deviation"):
        _ = subgaussian_tail_bound(c, 10, 3, 0.0)
