# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for the non-convex generalization and excess risk bounds."""

from __future__ import annotations

import pytest

from stabilab.bounds import Variant, nonconvex_excess_bound, nonconvex_gen_bound
from stabilab.common import InputError

ARGS = (1000, 2, 1e-3, 1e-2)


def test_with_spurious(c):
    """Test the terms of the bound with spurious local minima."""
    report = nonconvex_gen_bound(c, *ARGS)
    assert report.name == "nonconvex_gen_with_spurious"
    assert list(report.terms) == [
        "zeta_term",
        "delta_term",
        "sqrt_n_term",
        "one_over_n_term",
        "xi1_term",
        "xi2_term",
    ]
    assert report.terms["zeta_term"] == pytest.approx(8e-3)
    assert report.terms["delta_term"] == pytest.approx(2e-2)
    assert report.inputs["r"] == 1 / 16


def test_no_spurious(c):
    """Test the terms of the bound without spurious local minima."""
    report = nonconvex_gen_bound(c, *ARGS, Variant.NO_SPURIOUS, delta_prime=0.1)
    assert report.name == "nonconvex_gen_no_spurious"
    assert report.terms["delta_prime_term"] == pytest.approx(0.6)
    assert report.terms["one_over_n_term"] == pytest.approx(40 / 1000)
    assert "sqrt_n_term" not in report.terms


def test_variant_names(c):
    """Test variants are accepted by name."""
    report = nonconvex_gen_bound(c, *ARGS, "No-Spurious")
    assert report.name == "nonconvex_gen_no_spurious"
    with pytest.raises(ValueError, match="bad"):
        _ = nonconvex_gen_bound(c, *ARGS, "bad")


def test_strict_saddle(c):
    """Test the saddle curvature scales the gradient term."""
    report = nonconvex_gen_bound(c.replace(lambda_saddle=0.5), *ARGS)
    assert report.terms["zeta_term"] == pytest.approx(1.6e-2)


def test_excess_halves_leading_terms(c):
    """Test the excess bound halves the gradient and failure terms."""
    gen = nonconvex_gen_bound(c, *ARGS)
    excess = nonconvex_excess_bound(c, *ARGS)
    assert excess.name == "nonconvex_excess_with_spurious"
    assert excess.terms["zeta_term"] == pytest.approx(gen.terms["zeta_term"] / 2)
    assert excess.terms["delta_term"] == pytest.approx(gen.terms["delta_term"] / 2)
    assert gen.total - excess.total == pytest.approx(4e-3 + 1e-2)


def test_excess_opt_gap(c):
    """Test the measured optimization gap is passed through."""
    base = nonconvex_excess_bound(c, *ARGS)
    report = nonconvex_excess_bound(c, *ARGS, opt_gap=0.05)
    assert report.terms["opt_gap_term"] == 0.05
    assert report.total == pytest.approx(base.total + 0.05)


def test_excess_no_spurious_ignores_gap(c):
    """Test the optimization gap is unused without spurious local minima."""
    base = nonconvex_excess_bound(c, *ARGS, "no_spurious", 0.1)
    report = nonconvex_excess_bound(c, *ARGS, "no_spurious", 0.1, opt_gap=0.05)
    assert report.total == base.total
    assert "opt_gap ignored without spurious local minima" in report.notes
    assert report.terms["delta_prime_term"] == pytest.approx(0.8)


def test_underflow_note(c):
    """Test an underflowing failure probability is noted."""
    with pytest.warns(UserWarning, match="underflows"):
        report = nonconvex_gen_bound(c, 1e6, 2, 0.0, 0.0)
    assert report.inputs["xi2"] == 0.0
    assert "xi2 underflow reported as 0" in report.notes


@pytest.mark.parametrize("key", ["zeta_t", "delta", "delta_prime"])
def test_fail(c, key):
    """Test trap of negative inputs."""
    kwargs = {"zeta_t": 0.0, "delta": 0.0, "delta_prime": 0.0} | {key: -1.0}
    with pytest.raises(InputError, match=f"non-negative {key}"):
        _ = nonconvex_gen_bound(c, 1000, 2, **kwargs)
