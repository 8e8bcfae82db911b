# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for :func:`stabilab.stability.stability_sweep`."""

from __future__ import annotations

import pytest

from stabilab.stability import stability_sweep

#: Training set sizes of the scaling acceptance sweep.
N_VALUES: list[int] = [50, 100, 200, 400, 800]


def test_report(small_mean):
    """Test the sweep reports one estimate per training set size."""
    report = stability_sweep(small_mean, "gd", [20, 40, 80], 1, 6, probe_count=32)
    assert [estimate.n for estimate in report.stability] == [20, 40, 80]
    assert [gap.n for gap in report.gaps] == [20, 40, 80]
    assert all(estimate.replicates == 6 for estimate in report.stability)
    assert report.fit.points == 3
    assert report.fit.low <= report.fit.slope <= report.fit.high


def test_deterministic(small_mean):
    """Test the sweep is reproduced by the experiment seed."""
    first = stability_sweep(small_mean, "gd", [20, 40, 80], 1, 4, 9, probe_count=16)
    second = stability_sweep(small_mean, "gd", [20, 40, 80], 1, 4, 9, probe_count=16)
    assert first == second


@pytest.mark.slow
def test_scaling(quadratic_mean):
    """Test GD at convergence is stable at rate one over n."""
    report = stability_sweep(quadratic_mean, "gd", N_VALUES, 10, 50)
    assert -1.35 <= report.fit.slope <= -0.65
    assert report.gap_within_stability
