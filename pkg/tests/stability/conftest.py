# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""pytest fixture infra-structure for :mod:`stabilab.stability` unit-tests."""

from __future__ import annotations

import pytest

from stabilab.problems import make_quadratic_mean


@pytest.fixture(scope="module")
def small_mean():
    """Fixture generates a two-dimensional mean-estimation problem off the origin."""
    return make_quadratic_mean(2, mu=[0.4, -0.3])
