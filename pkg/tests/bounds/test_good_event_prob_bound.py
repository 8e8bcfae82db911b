# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for :func:`stabilab.bounds.good_event_prob_bound`."""

from __future__ import annotations

import pytest

from stabilab.bounds import good_event_prob_bound


def test_probability(c):
    """Test the bound is a probability clamped to one."""
    report = good_event_prob_bound(c, 100, 2)
    assert report.name == "good_event_prob"
    assert report.probability
    assert report.terms["hessian_lipschitz_term"] == pytest.approx(5.12)
    assert report.total > 1
    assert report.clamped == 1.0
    assert report.to_row()["clamped"] == 1.0


@pytest.mark.parametrize("n", [1e2, 1e4, 1e6])
def test_doubling(c, n):
    """Test doubling the sample size shrinks the bound by a factor in (2, 4)."""
    small = good_event_prob_bound(c, n, 5).total
    ratio = small / good_event_prob_bound(c, 2 * n, 5).total
    assert 2 < ratio < 4


def test_uses_minima_floor(c):
    """Test the saddle curvature does not enter the local minima event."""
    report = good_event_prob_bound(c, 100, 2)
    other = good_event_prob_bound(c.replace(lambda_saddle=0.1), 100, 2)
    assert other.total == report.total
