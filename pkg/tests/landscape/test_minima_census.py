# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for :func:`stabilab.landscape.minima_census`."""

from __future__ import annotations

import warnings

import numpy as np
import pytest

from stabilab.bounds import xi_terms
from stabilab.common import SOSP_TOL, InputError
from stabilab.landscape import minima_census, opt_gap_to_global
from stabilab.problems import empirical_grad


def test_double_well(double_well, well_sample, well_census):
    """Test the four sign patterns are found and matched."""
    assert well_census.passed
    assert well_census.count == 4
    assert sorted(well_census.matched) == [0, 1, 2, 3]
    assert well_census.unmatched_found == []
    assert well_census.starts_used == 200
    assert well_census.unconverged == 0
    for point in well_census.found_minima:
        grad = empirical_grad(double_well, point, well_sample)
        assert np.linalg.norm(grad) <= SOSP_TOL
    for _, distance in well_census.matched.values():
        assert distance <= 1e-7


def test_deduplicated(well_census):
    """Test found minima are pairwise at least the merge radius apart."""
    points = well_census.found_minima
    for i in range(well_census.count):
        for j in range(i):
            assert np.linalg.norm(points[i] - points[j]) >= well_census.merge_radius


def test_to_frame(well_census):
    """Test the tabulated census."""
    frame = well_census.to_frame()
    assert list(frame.columns) == ["w0", "w1", "risk", "matched_minimum", "distance"]
    assert frame.shape == (4, 5)
    assert sorted(frame["matched_minimum"]) == [0, 1, 2, 3]


def test_quadratic(quadratic_mean_2d):
    """Test a convex problem has a single minimum."""
    S = quadratic_mean_2d.sample(0, 50)
    census = minima_census(quadratic_mean_2d, S, seed=3)
    assert census.passed
    assert census.count == 1
    np.testing.assert_allclose(
        census.found_minima[0], quadratic_mean_2d.empirical_minimizer(S), atol=1e-7
    )
    assert census.match_radius == pytest.approx(0.4)
    assert opt_gap_to_global(quadratic_mean_2d, S, [1.0, 1.0], census) == 0.0


def test_opt_gap_symmetric(double_well, well_sample, well_census):
    """Test symmetric minima leave no optimization gap."""
    gap = opt_gap_to_global(double_well, well_sample, [0.4, -0.6], well_census)
    assert gap == pytest.approx(0.0, abs=1e-12)


def test_deterministic(double_well, well_sample, well_census):
    """Test the census is determined by the seed."""
    again = minima_census(double_well, well_sample)
    np.testing.assert_array_equal(again.found_minima, well_census.found_minima)


def test_doubled_starts(double_well, well_sample, well_census):
    """Test doubling the starts keeps every match in place."""
    doubled = minima_census(double_well, well_sample, starts=400)
    assert doubled.starts_used == 400
    assert len(doubled.matched) >= len(well_census.matched)
    for k, (index, _) in well_census.matched.items():
        assert k in doubled.matched
        again, _ = doubled.matched[k]
        np.testing.assert_allclose(
            doubled.found_minima[again], well_census.found_minima[index], atol=1e-6
        )


@pytest.mark.parametrize(
    ("kwargs", "match"), [({"starts": 199}, "at least 200 starts")]
)
def test_starts_fail(double_well, well_sample, kwargs, match):
    """Test trap of too few starts."""
    with pytest.raises(InputError, match=match):
        _ = minima_census(double_well, well_sample, **kwargs)


def test_dimension_fail(quadratic_mean):
    """Test trap of a high dimensional census."""
    S = quadratic_mean.sample(0, 10)
    with pytest.raises(InputError, match="at most 3"):
        _ = minima_census(quadratic_mean, S)


@pytest.mark.slow
def test_noisy_frequency(noisy_double_well):
    """Test the census passes as often as the failure probabilities allow."""
    n, replicates = 2000, 200
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        xi = xi_terms(noisy_double_well.constants, n, noisy_double_well.d)
        censuses = [
            minima_census(noisy_double_well, noisy_double_well.sample(seed, n))
            for seed in range(replicates)
        ]
    passed = [census for census in censuses if census.passed]
    frequency = len(passed) / replicates
    std_error = np.sqrt(frequency * (1 - frequency) / replicates)
    assert frequency >= 1 - min(xi.xi1 + xi.xi2, 1.0) - 3 * std_error
    assert all(census.count == census.K == 4 for census in passed)
