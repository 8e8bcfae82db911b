# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""pytest fixture infra-structure for :mod:`stabilab.landscape` unit-tests."""

from __future__ import annotations

import pytest

from stabilab.landscape import minima_census


@pytest.fixture(scope="module")
def well_sample(double_well):
    """Fixture generates a training set of the noiseless double-well."""
    return double_well.sample(0, 20)


@pytest.fixture(scope="module")
def well_census(double_well, well_sample):
    """Fixture generates the census of the noiseless double-well."""
    return minima_census(double_well, well_sample)
