# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for :func:`stabilab.problems.certify_constants`."""

from __future__ import annotations

import numpy as np
import pytest

from stabilab.common import CERTIFY_MARGIN, CertificationError, InputError
from stabilab.core import BallDomain, unit_ball
from stabilab.problems import (
    OracleSet,
    PopulationOracle,
    SampleOracle,
    boundary_points,
    certify_constants,
    domain_grid,
)
from stabilab.problems.certify import GRID_LIMIT


def _quartic_oracles(a=0.5):
    """Build the one-dimensional noiseless double-well oracles."""
    oracle = SampleOracle(
        lambda w, Z: np.full(Z.shape[0], 0.25 * float(np.sum((w**2 - a**2) ** 2))),
        lambda w, Z: np.tile(w * (w**2 - a**2), (Z.shape[0], 1)),
        lambda w, Z: np.tile(np.diag(3 * w**2 - a**2), (Z.shape[0], 1, 1)),
    )
    population = PopulationOracle(
        risk=lambda w: 0.25 * float(np.sum((w**2 - a**2) ** 2)),
        grad=lambda w: w * (w**2 - a**2),
        hess=lambda w: np.diag(3 * w**2 - a**2),
        local_minima=np.array([[a], [-a]]),
    )
    return oracle, population


def test_domain_grid_nested():
    """Test halving the resolution reproduces every coarse point."""
    domain = unit_ball(2)
    coarse = domain_grid(domain, 0.2)
    fine = domain_grid(domain, 0.1)
    assert np.all(np.linalg.norm(coarse, axis=1) <= 1.0)
    fine_keys = {tuple(np.round(point, 12)) for point in fine}
    assert all(tuple(np.round(point, 12)) in fine_keys for point in coarse)


def test_domain_grid_offset():
    """Test the grid is centred on the domain."""
    domain = BallDomain(center=np.array([1.0]), radius=0.5)
    grid = domain_grid(domain, 0.25)
    np.testing.assert_allclose(np.sort(grid[:, 0]), [0.5, 0.75, 1.0, 1.25, 1.5])


def test_domain_grid_fail():
    """Test trap of invalid and excessive resolutions."""
    with pytest.raises(InputError, match="positive grid resolution"):
        _ = domain_grid(unit_ball(1), 0.0)
    with pytest.raises(InputError, match=f"{GRID_LIMIT}"):
        _ = domain_grid(unit_ball(3), 1e-4)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_boundary_points(d):
    """Test boundary points lie on the sphere."""
    points = boundary_points(unit_ball(d), 0.1)
    norms = np.linalg.norm(points, axis=1)
    np.testing.assert_allclose(norms, 1.0, atol=1e-12)
    assert np.all(norms <= 1.0)


def test_boundary_points_random():
    """Test random boundary directions above three dimensions."""
    with pytest.raises(InputError, match="random stream"):
        _ = boundary_points(unit_ball(4), 0.1)
    points = boundary_points(unit_ball(4), 0.1, rng=np.random.default_rng(0), count=7)
    assert points.shape == (7, 4)


def test_quartic():
    """Test certification of the one-dimensional quartic."""
    oracle, population = _quartic_oracles()
    oracles = OracleSet("quartic", unit_ball(1), oracle, population, _probe)
    c = certify_constants(oracles, 1e-3)
    assert c.K == 2
    assert c.lam == pytest.approx(0.95 * 0.5)
    assert c.L1 == pytest.approx(1.05 * 2.75)
    assert c.L2 == pytest.approx(1.05 * 6.0, rel=1e-2)
    assert c.M == pytest.approx(1.05 * 0.25 * 0.75**2)
    assert c.beta == pytest.approx(0.95 * 0.75)
    assert c.grid_resolution == 1e-3
    assert c.grid_size > 2000


@pytest.mark.parametrize("resolution", [4e-2, 2e-2, 1e-2])
def test_refinement_monotone(resolution):
    """Test halving the resolution never lowers the upper constants."""
    oracle, population = _quartic_oracles()
    oracles = OracleSet("quartic", unit_ball(1), oracle, population, _probe)
    coarse = certify_constants(oracles, resolution)
    fine = certify_constants(oracles, resolution / 2)
    for name in ("L0", "L1", "L2", "M"):
        assert getattr(fine, name) >= (1 - CERTIFY_MARGIN) * getattr(coarse, name)
    assert fine.grid_size > coarse.grid_size


def test_degenerate_minimum():
    """Test trap of a degenerate population minimum."""
    oracle, population = _quartic_oracles()
    flat = PopulationOracle(
        risk=population.risk,
        grad=population.grad,
        hess=lambda w: np.zeros((1, 1)),
        local_minima=population.local_minima,
    )
    oracles = OracleSet("flat", unit_ball(1), oracle, flat, _probe)
    with pytest.raises(CertificationError, match="degenerate"):
        _ = certify_constants(oracles, 1e-2)


def _probe(rng, count):
    """Return placeholder samples for oracles that ignore them."""
    return np.zeros((max(count, 1), 1))
