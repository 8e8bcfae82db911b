# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for :func:`stabilab.bounds.local_minima_gen_bound`."""

from __future__ import annotations

import pytest

from stabilab.bounds import local_minima_gen_bound


def test_trap_radius(c):
    """Test the trap radius is the smaller of 3D and 3 lam / (2 L2)."""
    assert local_minima_gen_bound(c, 100, 2).inputs["trap_radius"] == 1.5
    flat = local_minima_gen_bound(c.replace(L2=0.0), 100, 2)
    assert flat.inputs["trap_radius"] == 3.0
    assert flat.terms["hessian_lipschitz_term"] == 0.0


def test_terms(c):
    """Test the term breakdown."""
    report = local_minima_gen_bound(c, 100, 2)
    assert list(report.terms) == [
        "lipschitz_term",
        "hessian_lipschitz_term",
        "concentration_term",
    ]
    assert report.terms["lipschitz_term"] == pytest.approx(0.08)
    assert report.terms["hessian_lipschitz_term"] == pytest.approx(0.08 * 64 * 1.5)


def test_one_over_n(c):
    """Test the bound decays as 1/n for large n."""
    n = 1e8
    large = local_minima_gen_bound(c, 10 * n, 4).total
    ratio = large / local_minima_gen_bound(c, n, 4).total
    assert ratio == pytest.approx(0.1, rel=0.15)
