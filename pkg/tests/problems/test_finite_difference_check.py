# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for :func:`stabilab.problems.finite_difference_check`."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from stabilab.problems import SampleOracle, finite_difference_check

FAMILIES = ["quadratic_mean", "double_well", "noisy_double_well", "logistic_blobs"]


@pytest.mark.parametrize("family", FAMILIES)
def test_oracles(request, family):
    """Test every family oracle agrees with central differences."""
    spec = request.getfixturevalue(family)
    report = finite_difference_check(spec, points=25, seed=1)
    assert report.points == 25
    assert report.passed, report


def test_broken_gradient(noisy_double_well):
    """Test a wrong gradient oracle is detected."""
    oracle = noisy_double_well.sample_oracle
    broken = SampleOracle(
        oracle.loss_fn,
        lambda w, Z: 1.01 * oracle.grad_fn(w, Z) + 0.01,
        oracle.hess_fn,
    )
    spec = replace(noisy_double_well, sample_oracle=broken)
    report = finite_difference_check(spec, points=5)
    assert not report.passed
    assert report.grad_rel_error > 1e-3


def test_single_sample_batching(quadratic_mean):
    """Test single sample calls agree with batched calls."""
    oracle = quadratic_mean.sample_oracle
    w = np.full(4, 0.25)
    Z = quadratic_mean.sample(0, 3).samples
    assert oracle.loss(w, Z[1]) == pytest.approx(oracle.loss_fn(w, Z)[1])
    np.testing.assert_allclose(oracle.grad(w, Z[1]), oracle.grad_fn(w, Z)[1])
