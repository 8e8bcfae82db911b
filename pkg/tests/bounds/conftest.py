# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""pytest fixture infra-structure for :mod:`stabilab.bounds` unit-tests."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import pytest

from stabilab.core import ConstantsBundle

BUNDLE_COUNT: int = 100


class Case(NamedTuple):
    """Define a randomized constants bundle with its evaluation point."""

    c: ConstantsBundle
    n: float
    d: int
    eps_t: float
    zeta_t: float
    delta: float
    delta_prime: float
    t: int


def _case(rng: np.random.Generator) -> Case:
    L1 = float(rng.uniform(0.1, 5.0))
    lam = L1 * float(rng.uniform(0.05, 1.0))
    c = ConstantsBundle(
        L0=float(rng.uniform(0.1, 5.0)),
        L1=L1,
        L2=0.0 if rng.random() < 0.2 else float(rng.uniform(0.01, 3.0)),
        lam=lam,
        alpha=float(rng.uniform(0.2, 2.0)),
        beta=L1 * float(rng.uniform(0.05, 0.95)),
        M=float(rng.uniform(0.1, 5.0)),
        D=float(rng.uniform(0.5, 4.0)),
        K=int(rng.integers(1, 6)),
        lambda_saddle=None if rng.random() < 0.5 else float(rng.uniform(0.01, 2.0)),
    )
    return Case(
        c=c,
        n=float(np.round(10 ** rng.uniform(1, 6))),
        d=int(rng.integers(2, 11)),
        eps_t=float(10 ** rng.uniform(-6, 0)),
        zeta_t=float(10 ** rng.uniform(-6, -1)),
        delta=float(10 ** rng.uniform(-6, -1)),
        delta_prime=float(10 ** rng.uniform(-6, -1)),
        t=int(rng.integers(1, 10**5)),
    )


@pytest.fixture(scope="session")
def cases():
    """Fixture generates the randomized constants bundles."""
    rng = np.random.default_rng(20250101)
    return [_case(rng) for _ in range(BUNDLE_COUNT)]


@pytest.fixture
def c():
    """Fixture generates a bundle with unit constants and unit diameter."""
    return ConstantsBundle(
        L0=1.0, L1=1.0, L2=1.0, lam=1.0, alpha=1.0, beta=None, M=1.0, D=1.0
    )
