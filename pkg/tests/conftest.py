# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""pytest fixture infra-structure for :mod:`stabilab` unit-tests."""

from __future__ import annotations

import numpy as np
import pytest

from stabilab.core import ConstantsBundle
from stabilab.problems import make_double_well, make_logistic_blobs, make_quadratic_mean


@pytest.fixture(scope="session")
def quadratic_mean():
    """Fixture generates the four-dimensional convex mean-estimation problem."""
    return make_quadratic_mean(4)


@pytest.fixture(scope="session")
def quadratic_mean_2d():
    """Fixture generates the two-dimensional convex mean-estimation problem."""
    return make_quadratic_mean(2, mu=[0.3, -0.2])


@pytest.fixture(scope="session")
def double_well_1d():
    """Fixture generates the noiseless one-dimensional double-well problem."""
    return make_double_well(1)


@pytest.fixture(scope="session")
def double_well():
    """Fixture generates the noiseless two-dimensional double-well problem."""
    return make_double_well(2)


@pytest.fixture(scope="session")
def noisy_double_well():
    """Fixture generates the noisy two-dimensional double-well problem."""
    return make_double_well(2, noise_scale=0.05, curvature_noise=0.05, seed=1)


@pytest.fixture(scope="session")
def logistic_blobs():
    """Fixture generates a two-class, two-feature logistic regression problem."""
    return make_logistic_blobs(classes=2, d=2, n_population_oracle=512, seed=0)


@pytest.fixture
def unit_constants():
    """Fixture generates a bundle with every constant equal to one."""
    return ConstantsBundle(
        L0=1.0, L1=1.0, L2=1.0, lam=1.0, alpha=1.0, beta=None, M=1.0, D=1.0
    )


@pytest.fixture
def rng():
    """Fixture generates a seeded random stream."""
    return np.random.default_rng(0)
