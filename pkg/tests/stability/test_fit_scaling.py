# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for :func:`stabilab.stability.fit_scaling`."""

from __future__ import annotations

import math

import numpy as np
import pytest

from stabilab.common import InputError
from stabilab.stability import fit_scaling

N_VALUES = [50, 100, 200, 400, 800]


def test_inverse():
    """Test exact inverse data fits a slope of minus one."""
    fit = fit_scaling(N_VALUES, [100 / n for n in N_VALUES])
    assert fit.slope == pytest.approx(-1.0, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(100.0))
    assert fit.low == pytest.approx(-1.0, abs=1e-9)
    assert fit.high == pytest.approx(-1.0, abs=1e-9)
    assert fit.points == 5


@pytest.mark.parametrize("power", [-0.5, -2.0])
def test_power(power):
    """Test exact power law data fits its exponent."""
    fit = fit_scaling(N_VALUES, [n**power for n in N_VALUES], resamples=50)
    assert fit.slope == pytest.approx(power, abs=1e-12)


def test_replicate_bootstrap():
    """Test the replicate bootstrap interval brackets the slope."""
    rng = np.random.default_rng(0)
    groups = [1 / n * rng.uniform(0.5, 1.5, size=50) for n in N_VALUES]
    means = [group.mean() for group in groups]
    fit = fit_scaling(N_VALUES, means, replicate_values=groups, resamples=200)
    assert fit.low <= fit.slope <= fit.high
    assert fit.high - fit.low < 0.5
    assert -1.35 <= fit.slope <= -0.65


def test_seeded():
    """Test the bootstrap interval is reproduced by its seed."""
    ys = [1.1 / 50, 0.9 / 100, 1.05 / 200, 0.95 / 400]
    first = fit_scaling(N_VALUES[:4], ys, resamples=100, seed=4)
    second = fit_scaling(N_VALUES[:4], ys, resamples=100, seed=4)
    assert first == second


def test_excluded():
    """Test non-positive means are excluded with a warning."""
    ys = [0.0, 1 / 100, 1 / 200, 1 / 400]
    with pytest.warns(UserWarning, match="stabilab excluded 1 non-positive"):
        fit = fit_scaling(N_VALUES[:4], ys, resamples=10)
    assert fit.points == 3
    assert fit.slope == pytest.approx(-1.0, abs=1e-12)


def test_too_few_fail():
    """Test trap of fewer than three positive points."""
    with (
        pytest.raises(InputError, match="at least 3 positive points"),
        pytest.warns(UserWarning, match="stabilab excluded"),
    ):
        _ = fit_scaling([1, 2, 3], [1.0, -1.0, 0.5])


def test_shape_fail():
    """Test trap of mismatched abscissae and means."""
    with pytest.raises(InputError, match="matching abscissae"):
        _ = fit_scaling([1, 2, 3], [1.0, 0.5])
