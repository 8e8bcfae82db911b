# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for :func:`stabilab.stability.estimate_stability`."""

from __future__ import annotations

import numpy as np
import pytest

from stabilab.stability import (
    estimate_excess_risk,
    estimate_generalization_gap,
    estimate_stability,
    replicate_results,
)


def test_identical(small_mean):
    """Test an algorithm trained twice on the same set has zero stability."""
    estimate = estimate_stability(small_mean, "sgd", 20, 30, 10, identical=True)
    assert estimate.value == 0.0
    assert estimate.std_error == 0.0
    assert estimate.values == (0.0,) * 10


def test_estimate(small_mean):
    """Test the estimate is the mean of the replicate probe maxima."""
    estimate = estimate_stability(small_mean, "gd", 40, 1, 12, probe_count=128)
    assert estimate.replicates == 12
    assert estimate.probe_count == 128
    assert estimate.n == 40
    assert estimate.t == 1
    assert len(estimate.values) == 12
    assert estimate.value == pytest.approx(np.mean(estimate.values))
    assert estimate.value > 0
    assert estimate.std_error > 0


def test_row(small_mean):
    """Test the CSV row of the estimate."""
    row = estimate_stability(small_mean, "gd", 40, 1, 3, probe_count=16).to_row()
    assert list(row) == [
        "n",
        "t",
        "stability",
        "stability_std_error",
        "replicates",
        "probe_count",
    ]


def test_algo_seeds(small_mean):
    """Test averaging over algorithm seeds leaves deterministic GD unchanged."""
    single = estimate_stability(small_mean, "gd", 40, 2, 5, 1, 64)
    averaged = estimate_stability(small_mean, "gd", 40, 2, 5, 3, 64)
    assert averaged.value == pytest.approx(single.value)


def test_stability_shrinks(small_mean):
    """Test the unit GD step is more stable on larger training sets."""
    small = estimate_stability(small_mean, "gd", 25, 1, 30, probe_count=128)
    large = estimate_stability(small_mean, "gd", 400, 1, 30, probe_count=128)
    assert large.value < small.value


def test_generalization_gap(small_mean):
    """Test the gap estimate averages the replicate gaps."""
    gap = estimate_generalization_gap(small_mean, "gd", 30, 1, 8)
    results = replicate_results(small_mean, "gd", 30, 1, 8, probe_count=1)
    assert gap.value == pytest.approx(np.mean([result.gap for result in results]))
    assert gap.replicates == 8
    assert list(gap.to_row()) == ["n", "t", "gap", "gap_std_error", "replicates"]


def test_excess_risk(small_mean):
    """Test the excess risk decomposition of the unit GD step."""
    report = estimate_excess_risk(small_mean, "gd", 50, 1, 30)
    assert report.checked
    assert report.located == 30
    assert abs(report.opt) <= 1e-12
    assert report.excess > 0
    assert report.holds
    assert report.to_row()["replicates"] == 30
