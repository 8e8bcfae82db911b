# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for the auxiliary calculators of :mod:`stabilab.bounds`."""

from __future__ import annotations

import math

import pytest

from stabilab.bounds import (
    error_bound_factors,
    leading_constant,
    nonconvex_validity,
    sgd_uniform_stability_baseline,
    xi2_rate_constants,
)
from stabilab.common import InputError


def test_sgd_baseline(c):
    """Test the classical SGD stability bound grows with the step count."""
    assert sgd_uniform_stability_baseline(c, 100, [0.1] * 10) == pytest.approx(0.02)
    assert sgd_uniform_stability_baseline(c, 100, [0.1] * 20) == pytest.approx(0.04)


def test_leading_constant(c):
    """Test the coefficient of log d / n."""
    assert leading_constant(c) == 3200
    assert leading_constant(c.replace(lam=0.5)) == 12800


def test_xi2_rate(c):
    """Test the exponential rate constants."""
    rate = xi2_rate_constants(c, 100, 2)
    assert rate.c1 == pytest.approx(2 * math.log(48))
    assert rate.c2 == pytest.approx(1 / (512 * math.log(48)))
    assert rate.applicable
    assert rate.bound == pytest.approx(math.exp(-rate.c1 * (100 * rate.c2 - 2)))


def test_xi2_rate_fail(c):
    """Test trap of a degenerate covering."""
    with pytest.raises(InputError, match="no rate is defined"):
        _ = xi2_rate_constants(c.replace(L2=0.0, alpha=8.0), 100, 2)


def test_validity(c):
    """Test the gradient and curvature conditions."""
    result = nonconvex_validity(c, 0.4, 0.7)
    assert result.zeta_ok
    assert not result.rho_ok
    assert not result.valid
    assert nonconvex_validity(c, 0.4, 0.4).valid


def test_error_bound_factors(c):
    """Test both error bound factors."""
    factors = error_bound_factors(c.replace(lambda_saddle=0.5))
    assert factors.proof == 4.0
    assert factors.statement == 0.125
