# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Numerical certification of problem constants over a grid of the domain.

Notes
-----
.. versionadded:: 0.1.0

"""

from __future__ import annotations

from dataclasses import dataclass
import itertools
import logging
import math
from typing import TYPE_CHECKING, Protocol

import lazy_loader as lazy

from ..common import (
    CERTIFY_MARGIN,
    CertificationError,
    ConstructionError,
    InputError,
    make_rng,
)
from ..core import BallDomain, ConstantsBundle, min_eigenvalue, project

if TYPE_CHECKING:
    from collections.abc import Callable

    import numpy as np

    from .oracles import PopulationOracle, ProblemSpec, SampleOracle

# lazy import third-party dependencies
np = lazy.load("numpy")

__all__ = [
    "DEFAULT_GRID_RESOLUTION",
    "Certifiable",
    "GRID_LIMIT",
    "MinimaCheck",
    "SeparationReport",
    "boundary_points",
    "certify_constants",
    "domain_grid",
    "population_minima_check",
    "validate_minima_separation",
]

logger = logging.getLogger(__name__)

DEFAULT_GRID_RESOLUTION: dict[int, float] = {1: 1e-3, 2: 2e-2, 3: 5e-2}
"""Default certification grid spacing keyed by parameter dimension."""

DEFAULT_SAMPLE_COUNT: int = 2048
"""Domain sample count used in place of a grid above three dimensions."""

DEFAULT_PROBE_COUNT: int = 32
"""Number of support probes evaluated at every grid point."""

GRID_LIMIT: int = 10_000_000
"""Largest admissible number of grid points."""

GRID_DIMENSION_LIMIT: int = 3
"""Largest dimension certified on a regular grid."""

MINIMA_GRAD_TOL: float = 1e-8
"""Population gradient tolerance at listed minima."""

NEIGHBOUR_STEP: float = 1e-3
"""Difference quotient step used for sampled domains."""


class Certifiable(Protocol):
    """Anything exposing the oracles and domain needed for certification.

    Satisfied by :class:`~stabilab.problems.oracles.ProblemSpec` and by
    :class:`~stabilab.problems.oracles.OracleSet`.

    """

    @property
    def name(self) -> str: ...

    @property
    def domain(self) -> BallDomain: ...

    @property
    def sample_oracle(self) -> SampleOracle: ...

    @property
    def population_oracle(self) -> PopulationOracle: ...

    @property
    def support_probe(self) -> Callable[[np.random.Generator, int], np.ndarray]: ...


def domain_grid(domain: BallDomain, resolution: float) -> np.ndarray:
    """Return the lattice points of spacing `resolution` inside the ball.

    Points are ``center + resolution * k`` for integer vectors ``k``, so
    halving the resolution reproduces every coarser point bit for bit.

    Parameters
    ----------
    domain : BallDomain
        The ball to cover.
    resolution : float
        The lattice spacing.

    Returns
    -------
    ndarray
        Array of shape ``(N, d)``.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if not resolution > 0:
        emsg = f"Require a positive grid resolution, got {resolution}."
        raise InputError(emsg)

    d = domain.dimension
    half = math.ceil(domain.radius / resolution)
    if (2 * half + 1) ** d > GRID_LIMIT:
        emsg = (
            f"Grid resolution {resolution} yields more than {GRID_LIMIT} points in "
            f"dimension {d}, choose a coarser resolution."
        )
        raise InputError(emsg)

    axis = np.arange(-half, half + 1)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    offsets = np.stack([m.ravel() for m in mesh], axis=1) * resolution
    keep = np.linalg.norm(offsets, axis=1) <= domain.radius
    return domain.center + offsets[keep]


def boundary_points(
    domain: BallDomain,
    resolution: float,
    *,
    rng: np.random.Generator | None = None,
    count: int | None = None,
) -> np.ndarray:
    """Return points on the bounding sphere, spaced about `resolution` apart.

    Parameters
    ----------
    domain : BallDomain
        The ball.
    resolution : float
        Approximate arc spacing between points.
    rng : Generator, optional
        Stream for random directions above three dimensions.
    count : int, optional
        Number of random directions above three dimensions.

    Returns
    -------
    ndarray
        Projected points of shape ``(N, d)``.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    d, r = domain.dimension, domain.radius

    if d == 1:
        directions = np.array([[-1.0], [1.0]])
    elif d == 2:
        m = max(8, math.ceil(2 * math.pi * r / resolution))
        theta = 2 * math.pi * np.arange(m) / m
        directions = np.column_stack([np.cos(theta), np.sin(theta)])
    elif d == 3:
        # fibonacci sphere
        m = max(16, math.ceil(4 * math.pi * r**2 / resolution**2))
        index = np.arange(m) + 0.5
        polar = np.arccos(1 - 2 * index / m)
        azimuth = math.pi * (1 + math.sqrt(5)) * index
        directions = np.column_stack(
            [
                np.cos(azimuth) * np.sin(polar),
                np.sin(azimuth) * np.sin(polar),
                np.cos(polar),
            ]
        )
    else:
        if rng is None or count is None:
            emsg = "Require a random stream and count for boundary points above 3D."
            raise InputError(emsg)
        directions = rng.standard_normal((count, d))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)

    points = domain.center + r * directions
    return np.array([project(domain, point) for point in points])


def _spectral_norms(hessians: np.ndarray) -> np.ndarray:
    return np.abs(np.linalg.eigvalsh(hessians)).max(axis=-1)


def certify_constants(
    spec: Certifiable,
    grid_resolution: float | None = None,
    *,
    probe_count: int | None = None,
    sample_count: int | None = None,
    seed: int = 0,
    require_beta: bool = False,
) -> ConstantsBundle:
    """Certify the problem constants numerically over the domain.

    ``L0``, ``L1`` and ``M`` are maxima over (grid of the domain) x (support
    probes), ``L2`` is the largest Hessian difference quotient between axis
    neighbours, ``lam`` is the smallest population Hessian eigenvalue over
    the listed minima, ``lambda_saddle`` is the smallest curvature magnitude
    at near-critical grid points, ``alpha`` is the largest gradient threshold
    for which the strict-saddle implication holds on the grid, and ``beta``
    is the smallest radial population gradient over the unit sphere less
    the largest per-sample deviation. Upper constants are inflated and lower
    constants deflated by :data:`~stabilab.common.CERTIFY_MARGIN`.

    Parameters
    ----------
    spec : Certifiable
        The problem, or the oracles of a problem under construction.
    grid_resolution : float, optional
        Lattice spacing for domains of dimension at most three. Defaults to
        :data:`DEFAULT_GRID_RESOLUTION`. Higher dimensional domains are
        covered by seeded uniform samples instead.
    probe_count : int, optional
        Number of support probes per grid point. Defaults to
        :data:`DEFAULT_PROBE_COUNT`.
    sample_count : int, optional
        Number of domain samples above three dimensions. Defaults to
        :data:`DEFAULT_SAMPLE_COUNT`.
    seed : int, default=0
        Seed of the probe and sample streams.
    require_beta : bool, default=False
        Raise :class:`~stabilab.common.ConstructionError` unless a positive
        ``beta`` is certified.

    Returns
    -------
    ConstantsBundle
        The certified constants, recording the grid used.

    Raises
    ------
    CertificationError
        If the strict-saddle implication cannot hold for any positive
        threshold, or a listed minimum is degenerate.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    domain = spec.domain
    d = domain.dimension
    rng = make_rng(seed)
    oracle = spec.sample_oracle
    population = spec.population_oracle

    if probe_count is None:
        probe_count = DEFAULT_PROBE_COUNT

    if d <= GRID_DIMENSION_LIMIT:
        if grid_resolution is None:
            grid_resolution = DEFAULT_GRID_RESOLUTION[d]
        interior = domain_grid(domain, grid_resolution)
        boundary = boundary_points(domain, grid_resolution)
        step = grid_resolution
        recorded_resolution: float | None = grid_resolution
    else:
        if sample_count is None:
            sample_count = DEFAULT_SAMPLE_COUNT
        interior = domain.sample(rng, sample_count)
        boundary = boundary_points(
            domain, NEIGHBOUR_STEP, rng=rng, count=max(sample_count // 4, 1)
        )
        step = NEIGHBOUR_STEP
        recorded_resolution = None

    probes = spec.support_probe(rng, probe_count)
    minima = population.local_minima
    points = np.vstack([interior, boundary, minima])
    eye = np.eye(d)

    L0 = L1 = L2 = M = 0.0
    for w in points:
        M = max(M, float(np.max(oracle.loss_fn(w, probes))))
        L0 = max(L0, float(np.max(np.linalg.norm(oracle.grad_fn(w, probes), axis=1))))
        hessians = oracle.hess_fn(w, probes)
        L1 = max(L1, float(np.max(_spectral_norms(hessians))))
        for j in range(d):
            neighbour = w + step * eye[j]
            if domain.contains(neighbour):
                delta = oracle.hess_fn(neighbour, probes) - hessians
                L2 = max(L2, float(np.max(_spectral_norms(delta))) / step)

    lam_raw = min(min_eigenvalue(population.hess(m)) for m in minima)
    if lam_raw <= 0:
        emsg = (
            f"Population minima of {spec.name!r} are degenerate, smallest Hessian "
            f"eigenvalue {lam_raw:.3e}."
        )
        raise CertificationError(emsg)

    # strict-saddle scan over the population landscape
    scan = np.vstack([interior, boundary])
    grad_norms = np.array([np.linalg.norm(population.grad(w)) for w in scan])
    min_eigs = np.linalg.eigvalsh(np.array([population.hess(w) for w in scan]))[:, 0]

    critical = grad_norms <= L1 * step * math.sqrt(d) / 2
    lambda_saddle: float | None = None
    if np.any(critical):
        index = np.flatnonzero(critical)[np.argmin(np.abs(min_eigs[critical]))]
        saddle_raw = float(np.abs(min_eigs[index]))
        if saddle_raw <= 0:
            emsg = (
                f"Degenerate critical point of {spec.name!r} at {scan[index].tolist()}."
            )
            raise CertificationError(
                emsg,
                point=scan[index],
                grad_norm=float(grad_norms[index]),
                min_eig=float(min_eigs[index]),
            )
        if saddle_raw < lam_raw:
            lambda_saddle = (1 - CERTIFY_MARGIN) * saddle_raw

    lam = (1 - CERTIFY_MARGIN) * lam_raw
    candidate = lam if lambda_saddle is None else min(lam, lambda_saddle)
    flat = np.abs(min_eigs) < candidate
    if np.any(flat):
        index = np.flatnonzero(flat)[np.argmin(grad_norms[flat])]
        alpha_raw = float(grad_norms[index])
        if alpha_raw <= np.finfo(float).eps * max(L0, 1.0):
            emsg = (
                f"Strict-saddle implication fails for {spec.name!r} at "
                f"{scan[index].tolist()}: gradient norm {alpha_raw:.3e} with "
                f"smallest eigenvalue {min_eigs[index]:.3e}."
            )
            raise CertificationError(
                emsg,
                point=scan[index],
                grad_norm=alpha_raw,
                min_eig=float(min_eigs[index]),
            )
    else:
        alpha_raw = float(np.max(grad_norms))

    L1 = (1 + CERTIFY_MARGIN) * max(L1, lam_raw)

    beta: float | None = None
    beta_raw = -math.inf
    if domain.is_unit_ball:
        beta_raw = math.inf
        for w in boundary:
            population_grad = population.grad(w)
            radial = float(population_grad @ w)
            spread = (oracle.grad_fn(w, probes) - population_grad) @ w
            deviation = float(np.max(np.abs(spread)))
            beta_raw = min(beta_raw, radial - deviation)
        if beta_raw > 0:
            beta = min((1 - CERTIFY_MARGIN) * beta_raw, L1 * (1 - CERTIFY_MARGIN))

    if require_beta and beta is None:
        emsg = (
            f"Certified boundary gradient floor beta={beta_raw:.3e} is not positive "
            f"for {spec.name!r}, choose smaller noise parameters."
        )
        raise ConstructionError(emsg)

    constants = ConstantsBundle(
        L0=(1 + CERTIFY_MARGIN) * L0,
        L1=L1,
        L2=(1 + CERTIFY_MARGIN) * L2,
        lam=lam,
        alpha=(1 - CERTIFY_MARGIN) * alpha_raw,
        beta=beta,
        M=(1 + CERTIFY_MARGIN) * M,
        D=domain.diameter,
        K=population.K,
        lambda_saddle=lambda_saddle,
        grid_resolution=recorded_resolution,
        grid_size=int(points.shape[0]),
    )
    logger.debug(
        "certified %s over %d points: %s", spec.name, points.shape[0], constants
    )
    return constants


@dataclass(frozen=True)
class SeparationReport:
    """Pairwise distances of population minima against ``4 lam / L2``."""

    passed: bool
    bound: float
    distances: tuple[tuple[int, int, float], ...]

    @property
    def vacuous(self) -> bool:
        """Whether there were no pairs to check."""
        return not self.distances


def validate_minima_separation(
    spec: ProblemSpec, constants: ConstantsBundle | None = None
) -> SeparationReport:
    """Check that population minima are at least ``4 lam / L2`` apart.

    Parameters
    ----------
    spec : ProblemSpec
        The problem.
    constants : ConstantsBundle, optional
        The constants to check against. Defaults to those of `spec`.

    Returns
    -------
    SeparationReport
        All pairwise distances and whether each meets the bound.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if constants is None:
        constants = spec.constants

    minima = spec.population_oracle.local_minima
    if minima.shape[0] < 2:
        return SeparationReport(passed=True, bound=0.0, distances=())

    if constants.L2 <= 0:
        emsg = "Minima separation requires L2 > 0 when there are several minima."
        raise InputError(emsg)

    bound = 4 * constants.lam / constants.L2
    distances = tuple(
        (i, j, float(np.linalg.norm(minima[i] - minima[j])))
        for i, j in itertools.combinations(range(minima.shape[0]), 2)
    )
    passed = all(distance >= bound for _, _, distance in distances)
    return SeparationReport(passed=passed, bound=bound, distances=distances)


@dataclass(frozen=True)
class MinimaCheck:
    """Population oracle consistency at the listed minima."""

    max_grad_norm: float
    min_eigenvalue: float
    global_index_ok: bool
    passed: bool


def population_minima_check(spec: ProblemSpec) -> MinimaCheck:
    """Check gradient, curvature and global index of the listed minima.

    Gradients must vanish to ``1e-8`` in analytic mode only.

    Parameters
    ----------
    spec : ProblemSpec
        The problem.

    Returns
    -------
    MinimaCheck
        The worst gradient norm, smallest eigenvalue and global index check.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    population = spec.population_oracle
    minima = population.local_minima
    grad_norm = max(float(np.linalg.norm(population.grad(m))) for m in minima)
    eig = min(min_eigenvalue(population.hess(m)) for m in minima)
    risks = np.array([population.risk(m) for m in minima])
    global_ok = bool(risks[population.global_min_index] <= risks.min())

    analytic = population.mode == "analytic"
    passed = (
        (grad_norm <= MINIMA_GRAD_TOL or not analytic)
        and eig >= spec.constants.lam - 1e-8
        and global_ok
    )
    return MinimaCheck(grad_norm, eig, global_ok, passed)
