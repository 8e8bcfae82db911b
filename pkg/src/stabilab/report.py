# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Generate an environment report of the Python packages behind an experiment.

Notes
-----
.. versionadded:: 0.1.0

"""

from __future__ import annotations

import types

import scooby

from .common import PRNG_ALGORITHM, SEED_DERIVATION

__all__ = [
    "NCOL",
    "PACKAGES_CORE",
    "PACKAGES_OPTIONAL",
    "TEXT_WIDTH",
    "PackageLike",
    "Report",
]

# this is a type alias
type PackageLike = str | types.ModuleType
"""Type alias for a package module or package name."""

# constants
NCOL: int = 3
"""Default number of package columns in report HTML table."""

PACKAGES_CORE: list[str] = [
    "click",
    "click-default-group",
    "joblib",
    "lazy-loader",
    "numpy",
    "pandas",
    "platformdirs",
    "pykdtree",
    "scipy",
    "scooby",
    "stabilab",
]
"""The core packages of stabilab to include in the environment report."""

PACKAGES_OPTIONAL: list[str] = [
    "hypothesis",
    "pytest",
    "pytest-cov",
    "pytest-mock",
]
"""The optional packages of stabilab to include in the environment report."""

TEXT_WIDTH: int = 88
"""Default text width of non-HTML report."""


class Report(scooby.Report):  # numpydoc ignore=PR01
    """Generate an environment package report.

    The pseudo-random generator and seed derivation of every experiment are
    recorded alongside the package versions.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    def __init__(
        self,
        *,
        additional: PackageLike | list[PackageLike] | None = None,
        ncol: int | None = None,
        text_width: int | None = None,
        sort: bool | None = True,
    ) -> None:
        """Generate an environment package report.

        Parameters
        ----------
        additional : PackageLike or list of PackageLike, optional
            Extra package modules or package names to include in the report.
        ncol : int, optional
            The number of package columns in a HTML table report. Defaults to
            :data:`NCOL`.
        text_width : int, optional
            The number of character columns in a non-HTML report. Defaults to
            :data:`TEXT_WIDTH`.
        sort : bool, optional
            Alphabetically sort the packages. Defaults to ``True``.

        Notes
        -----
        .. versionadded:: 0.1.0

        """
        if ncol is None:
            ncol = NCOL

        if text_width is None:
            text_width = TEXT_WIDTH

        super().__init__(
            additional=additional,
            core=PACKAGES_CORE,
            optional=PACKAGES_OPTIONAL,
            ncol=ncol,
            text_width=text_width,
            sort=sort,
            extra_meta=[("PRNG", PRNG_ALGORITHM), ("Seed derivation", SEED_DERIVATION)],
        )

    @property
    def versions(self) -> dict[str, str]:
        """The installed version of each reported package."""
        return {name: str(version) for name, version in self.packages.items()}
