# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Provision common stabilab infra-structure and utilities.

Notes
-----
.. versionadded:: 0.1.0

"""

from __future__ import annotations

from enum import StrEnum
import hashlib
import struct
from typing import TYPE_CHECKING

import lazy_loader as lazy

if TYPE_CHECKING:
    import numpy as np

# lazy import third-party dependencies
np = lazy.load("numpy")

__all__ = [
    "BOUNDARY_TOL",
    "CERTIFY_MARGIN",
    "DEFAULT_PROBE_COUNT",
    "DEFAULT_REPLICATES",
    "DEFAULT_STEP_CAP",
    "PRNG_ALGORITHM",
    "SEED_DERIVATION",
    "SOSP_TOL",
    "STREAMS",
    "Algorithm",
    "CertificationError",
    "ConfigError",
    "ConstructionError",
    "HaltReason",
    "InputError",
    "OptimizationError",
    "StabilabError",
    "StrEnumPlus",
    "derive_seed",
    "make_rng",
    "spawn_seeds",
]

BOUNDARY_TOL: float = 1e-10
"""Tolerance on the unit sphere used to detect boundary iterates."""

CERTIFY_MARGIN: float = 0.05
"""Relative safety margin applied to numerically certified constants."""

DEFAULT_PROBE_COUNT: int = 512
"""Default size of the frozen probe set approximating the stability supremum."""

DEFAULT_REPLICATES: int = 50
"""Default number of Monte-Carlo replicates per grid cell."""

DEFAULT_STEP_CAP: int = 1_000_000
"""Default iteration cap for saddle-escaping projected gradient descent."""

MASK64: int = (1 << 64) - 1
"""Bit mask selecting the lower 64 bits of a seed."""

PRNG_ALGORITHM: str = "numpy.random.Philox"
"""Frozen identifier of the counter-based generator behind every random stream."""

SEED_DERIVATION: str = (
    "seed = base_seed XOR blake2b-64(little-endian int64 replicate, n, t)"
)
"""Human readable description of the replicate seed derivation."""

SOSP_TOL: float = 1e-7
"""Gradient and curvature tolerance for census membership."""

STREAMS: tuple[str, ...] = ("data", "substitute", "probes", "algorithm")
"""Names of the independent child streams spawned from a replicate seed."""


class StrEnumPlus(StrEnum):
    """Convenience behaviour for a string enumeration.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    @classmethod
    def _missing_(cls, value: object) -> StrEnumPlus | None:
        """Handle missing enumeration members.

        Members are matched case-insensitively, with ``-`` accepted in place
        of ``_``.

        Parameters
        ----------
        value : object
            The candidate enumeration member.

        Returns
        -------
        StrEnumPlus
            The enum member or None if the member is not a valid
            enumeration member.

        Notes
        -----
        .. versionadded:: 0.1.0

        """
        value_string = str(value).lower().replace("-", "_")
        for member in cls:
            if member.value == value_string:
                return member
        return None

    @classmethod
    def valid(cls, item: str | StrEnumPlus) -> bool:
        """Determine whether the provided item is a valid enumeration member.

        Parameters
        ----------
        item : str or StrEnumPlus
            The candidate enumeration member.

        Returns
        -------
        bool
            Whether the enumeration member is valid.

        Notes
        -----
        .. versionadded:: 0.1.0

        """
        return str(item).lower().replace("-", "_") in cls.values()

    @classmethod
    def values(cls) -> tuple[str, ...]:
        """Return all the enumeration member values.

        Returns
        -------
        tuple of str
            The enumeration member values.

        Notes
        -----
        .. versionadded:: 0.1.0

        """
        return tuple(member.value for member in cls)


class Algorithm(StrEnumPlus):
    """Enumeration of supported optimization procedures.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    GD = "gd"
    SGD = "sgd"
    PGD = "pgd"


class HaltReason(StrEnumPlus):
    """Enumeration of reasons an optimizer trace stopped.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    COMPLETED = "completed"
    SOSP_FOUND = "sosp_found"
    STEP_CAP = "step_cap"


class StabilabError(Exception):
    """Base class of all stabilab errors."""


class InputError(StabilabError, ValueError):
    """Invalid argument or usage of a stabilab operation."""


class ConfigError(InputError):
    """Experiment configuration failed schema validation."""


class ConstructionError(StabilabError):
    """A problem family could not be constructed from its parameters."""


class CertificationError(StabilabError):
    """The strict-saddle implication failed at a certification grid point.

    Parameters
    ----------
    emsg : str
        The error message.
    point : ndarray, optional
        The violating parameter vector.
    grad_norm : float, optional
        Population gradient norm at `point`.
    min_eig : float, optional
        Smallest population Hessian eigenvalue at `point`.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    def __init__(
        self,
        emsg: str,
        *,
        point: np.ndarray | None = None,
        grad_norm: float | None = None,
        min_eig: float | None = None,
    ) -> None:
        super().__init__(emsg)
        self.point = point
        self.grad_norm = grad_norm
        self.min_eig = min_eig


class OptimizationError(StabilabError, RuntimeError):
    """An optimizer produced non-finite values or failed to converge.

    Parameters
    ----------
    emsg : str
        The error message.
    grad_norm : float, optional
        The last observed gradient norm.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    def __init__(self, emsg: str, *, grad_norm: float | None = None) -> None:
        super().__init__(emsg)
        self.grad_norm = grad_norm


def derive_seed(base_seed: int, replicate: int, n: int = 0, t: int = 0) -> int:
    """Derive the seed of one replicate from the experiment base seed.

    The replicate key ``(replicate, n, t)`` is packed as three little-endian
    signed 64-bit integers, hashed with 64-bit BLAKE2b and XOR-ed into the
    lower 64 bits of `base_seed`. The derivation is order independent and can
    be reproduced by external tools.

    Parameters
    ----------
    base_seed : int
        The non-negative experiment seed.
    replicate : int
        The replicate index.
    n : int, default=0
        The dataset size of the grid cell.
    t : int, default=0
        The step count of the grid cell.

    Returns
    -------
    int
        A non-negative 64-bit seed.

    Notes
    -----
    .. versionadded:: 0.1.0

    Examples
    --------
    >>> derive_seed(0, 0) == derive_seed(0, 0)
    True
    >>> derive_seed(0, 1) != derive_seed(0, 2)
    True

    """
    if base_seed < 0:
        emsg = f"Require a non-negative base seed, got {base_seed}."
        raise InputError(emsg)

    key = struct.pack("<3q", replicate, n, t)
    digest = hashlib.blake2b(key, digest_size=8).digest()
    return (base_seed & MASK64) ^ int.from_bytes(digest, "little")


def spawn_seeds(seed: int, count: int = len(STREAMS)) -> tuple[int, ...]:
    """Spawn independent child seeds from a replicate seed.

    Parameters
    ----------
    seed : int
        The parent seed.
    count : int, optional
        The number of child seeds. Defaults to one per entry of
        :data:`STREAMS`.

    Returns
    -------
    tuple of int
        The child seeds.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    state = np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)
    return tuple(int(value) for value in state)


def make_rng(seed: int) -> np.random.Generator:
    """Create the counter-based generator for a seed.

    Parameters
    ----------
    seed : int
        The non-negative seed.

    Returns
    -------
    Generator
        A :class:`numpy.random.Generator` driven by
        :class:`numpy.random.Philox`.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    return np.random.Generator(np.random.Philox(seed))
