# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for :func:`stabilab.optimizers.largest_admissible_epsilon`."""

from __future__ import annotations

import pytest

from stabilab.common import InputError
from stabilab.optimizers import PgdConfig, largest_admissible_epsilon


@pytest.fixture
def constants(unit_constants):
    """Fixture generates unit constants with a certified beta."""
    return unit_constants.replace(beta=0.5)


def test_value(constants):
    """Test the smallest of the three admissibility conditions."""
    assert largest_admissible_epsilon(constants) == pytest.approx(27 / 64**3)
    relaxed = constants.replace(L2=0.01, L1=4.0)
    expected = min(8 * 0.125 * 1e-6 / (27 * 64), 27 / (64**3 * 1e-6), 0.25)
    assert largest_admissible_epsilon(relaxed) == pytest.approx(expected)


def test_flat_hessian(constants):
    """Test no tolerance is admissible without Hessian Lipschitz continuity."""
    assert largest_admissible_epsilon(constants.replace(L2=0.0)) == 0.0


def test_fail(unit_constants):
    """Test trap of a missing beta."""
    with pytest.raises(InputError, match="beta"):
        _ = largest_admissible_epsilon(unit_constants)


def test_config(constants):
    """Test the derived tolerances of a configuration."""
    config = PgdConfig(epsilon=1e-6, constants=constants)
    assert config.gamma == pytest.approx(1e-2)
    assert config.mix == pytest.approx(3 * 1e-2 / (2 * 0.5))
    config.validate()


@pytest.mark.parametrize(
    ("kwargs", "match"),
    [
        ({"epsilon": 0.0}, "0 < epsilon"),
        ({"epsilon": 1e-3}, "0 < epsilon"),
        ({"epsilon": 1e-6, "max_steps": 0}, "positive step cap"),
        ({"epsilon": 1e-6, "record_stride": 0}, "positive record stride"),
    ],
)
def test_config_fail(constants, kwargs, match):
    """Test trap of an inadmissible configuration."""
    with pytest.raises(InputError, match=match):
        PgdConfig(constants=constants, **kwargs).validate()
