# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Synthetic problem families, loss oracles and constant certification.

Notes
-----
.. versionadded:: 0.1.0

"""

from __future__ import annotations

from .certify import (
    Certifiable,
    MinimaCheck,
    SeparationReport,
    boundary_points,
    certify_constants,
    domain_grid,
    population_minima_check,
    validate_minima_separation,
)
from .families import (
    PROBLEM_BUILDERS,
    build_problem,
    make_double_well,
    make_logistic_blobs,
    make_quadratic_mean,
)
from .oracles import (
    FiniteDifferenceReport,
    OracleSet,
    PopulationMode,
    PopulationOracle,
    ProblemSpec,
    SampleOracle,
    empirical_grad,
    empirical_hess,
    empirical_risk,
    finite_difference_check,
    monte_carlo_population,
)

__all__ = [
    "PROBLEM_BUILDERS",
    "Certifiable",
    "FiniteDifferenceReport",
    "MinimaCheck",
    "OracleSet",
    "PopulationMode",
    "PopulationOracle",
    "ProblemSpec",
    "SampleOracle",
    "SeparationReport",
    "boundary_points",
    "build_problem",
    "certify_constants",
    "domain_grid",
    "empirical_grad",
    "empirical_hess",
    "empirical_risk",
    "finite_difference_check",
    "make_double_well",
    "make_logistic_blobs",
    "make_quadratic_mean",
    "monte_carlo_population",
    "population_minima_check",
    "validate_minima_separation",
]
