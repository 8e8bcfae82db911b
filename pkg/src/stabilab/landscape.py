# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Probes of the empirical risk landscape.

Provides location of the empirical minimum trapped near each population
minimum, a multistart census of all empirical local minima, verification of
the distance-to-minima error bound and maps of the strict-saddle field.

The census is a brute-force oracle, so it is restricted to parameter
dimensions of at most three.

Notes
-----
.. versionadded:: 0.1.0

"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math
from typing import TYPE_CHECKING, Any, NamedTuple
import warnings

import lazy_loader as lazy

from .bounds import error_bound_factors
from .common import CERTIFY_MARGIN, SOSP_TOL, InputError, OptimizationError, make_rng
from .core import BallDomain, as_param_vector, min_eigenvalue, project
from .problems import domain_grid, empirical_grad, empirical_hess, empirical_risk
from .problems.certify import DEFAULT_GRID_RESOLUTION, GRID_DIMENSION_LIMIT
from .search import KDTree

if TYPE_CHECKING:
    from numpy.typing import ArrayLike
    import numpy as np
    import pandas as pd

    from .core import Dataset, ParamVector
    from .problems import ProblemSpec

# lazy import third-party dependencies
np = lazy.load("numpy")
pd = lazy.load("pandas")
qmc = lazy.load("scipy.stats.qmc")

__all__ = [
    "CENSUS_MIN_STARTS",
    "CENSUS_STEP_CAP",
    "LOCATE_STEP_CAP",
    "LOCATE_STEP_TOL",
    "UNCONVERGED_LIMIT",
    "EmpiricalMinimum",
    "ErrorBoundReport",
    "FieldReport",
    "MinimaCensus",
    "error_bound_check",
    "locate_empirical_min_near",
    "min_eig_field",
    "minima_census",
    "opt_gap_to_global",
    "trap_radius",
]

logger = logging.getLogger(__name__)

CENSUS_MIN_STARTS: int = 200
"""The fewest multistart runs accepted by a census."""

CENSUS_STEP_CAP: int = 20_000
"""The maximum projected gradient steps of each census run."""

LOCATE_STEP_CAP: int = 100_000
"""The maximum projected gradient steps when locating an empirical minimum."""

LOCATE_STEP_TOL: float = 1e-10
"""Projected gradient step length at which minimum location stops."""

UNCONVERGED_LIMIT: float = 0.05
"""Fraction of unconverged census runs above which a warning is issued."""


def trap_radius(spec: ProblemSpec) -> float:
    """Return the radius ``lam / (4 L2)`` trapping each empirical minimum.

    The whole domain diameter is returned when ``L2 = 0``.
    """
    c = spec.constants
    return c.D if c.L2 == 0 else c.lam / (4 * c.L2)


class EmpiricalMinimum(NamedTuple):
    """An empirical minimum located near a population minimum."""

    point: ParamVector
    interior: bool
    steps: int
    grad_norm: float


def locate_empirical_min_near(
    spec: ProblemSpec, S: Dataset, k: int
) -> EmpiricalMinimum:
    """Minimize the empirical risk over the ball trapping population minimum `k`.

    Runs projected gradient descent with step size ``1 / L1`` from the
    population minimum over its ball of radius :func:`trap_radius`,
    intersected with the domain, until a step is shorter than
    :data:`LOCATE_STEP_TOL`.

    Parameters
    ----------
    spec : ProblemSpec
        The problem.
    S : Dataset
        The training set.
    k : int
        Index of the population minimum.

    Returns
    -------
    EmpiricalMinimum
        The terminal point and whether it is interior to the trapping ball,
        in which case it is a local minimum of the empirical risk.

    Raises
    ------
    OptimizationError
        If the steps do not shrink below tolerance within
        :data:`LOCATE_STEP_CAP` steps.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    minima = spec.population_oracle.local_minima
    if not 0 <= k < minima.shape[0]:
        emsg = f"Population minimum index {k} out of range [0, {minima.shape[0]})."
        raise InputError(emsg)

    c = spec.constants
    eta = 1.0 / c.L1
    whole = c.L2 == 0
    ball = BallDomain(center=minima[k], radius=trap_radius(spec))

    def step(w: ParamVector) -> ParamVector:
        target = w - eta * empirical_grad(spec, w, S)
        if not whole:
            target = project(ball, target)
        return project(spec.domain, target)

    w = project(spec.domain, minima[k])
    for count in range(1, LOCATE_STEP_CAP + 1):
        updated = step(w)
        moved = float(np.linalg.norm(updated - w))
        w = updated
        if moved <= LOCATE_STEP_TOL:
            break
    else:
        grad_norm = float(np.linalg.norm(empirical_grad(spec, w, S)))
        emsg = (
            f"Empirical minimum near population minimum {k} not located within "
            f"{LOCATE_STEP_CAP} steps."
        )
        raise OptimizationError(emsg, grad_norm=grad_norm)

    interior = not spec.domain.on_boundary(w, 1e-8)
    if not whole:
        interior = interior and not ball.on_boundary(w, 1e-8)
    grad_norm = float(np.linalg.norm(empirical_grad(spec, w, S)))
    logger.debug("located empirical minimum %d after %d steps", k, count)
    return EmpiricalMinimum(w, interior, count, grad_norm)


@dataclass(frozen=True)
class MinimaCensus:
    """All empirical local minima found by a multistart search.

    Found minima are sorted by empirical risk, then by position, and are
    pairwise at least `merge_radius` apart.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    found_minima: np.ndarray
    found_risks: np.ndarray
    matched: dict[int, tuple[int, float]]
    unmatched_found: list[int]
    starts_used: int
    K: int
    merge_radius: float
    match_radius: float
    unconverged: int = 0
    boundary_excluded: int = 0
    notes: tuple[str, ...] = field(default=())

    @property
    def count(self) -> int:
        """The number of distinct minima found."""
        return int(self.found_minima.shape[0])

    @property
    def passed(self) -> bool:
        """Whether exactly one minimum was matched to each population minimum."""
        return self.count == self.K and len(self.matched) == self.K

    def to_frame(self) -> pd.DataFrame:
        """Tabulate the found minima with their matches."""
        partner = {found: (k, dist) for k, (found, dist) in self.matched.items()}
        rows = []
        for index, (point, risk) in enumerate(
            zip(self.found_minima, self.found_risks, strict=True)
        ):
            k, dist = partner.get(index, (-1, math.nan))
            row: dict[str, Any] = {f"w{j}": value for j, value in enumerate(point)}
            row |= {"risk": risk, "matched_minimum": k, "distance": dist}
            rows.append(row)
        return pd.DataFrame(rows)


def _sobol_starts(domain: BallDomain, starts: int, seed: int) -> np.ndarray:
    d = domain.dimension
    m = math.ceil(math.log2(4 * starts))
    sampler = qmc.Sobol(d, scramble=True, seed=make_rng(seed))
    while True:
        cube = 2 * sampler.random_base2(m) - 1
        inside = cube[np.linalg.norm(cube, axis=1) <= 1]
        if inside.shape[0] >= starts:
            return domain.center + domain.radius * inside[:starts]
        m += 1
        sampler.reset()


def _descend(
    spec: ProblemSpec, S: Dataset, w: ParamVector, tol: float
) -> tuple[ParamVector, bool]:
    eta = 1.0 / spec.constants.L1
    for _ in range(CENSUS_STEP_CAP):
        g = empirical_grad(spec, w, S)
        if np.linalg.norm(g) <= tol:
            return w, True
        updated = project(spec.domain, w - eta * g)
        if float(np.linalg.norm(updated - w)) <= LOCATE_STEP_TOL:
            return updated, False
        w = updated
    return w, False


def minima_census(
    spec: ProblemSpec,
    S: Dataset,
    starts: int = CENSUS_MIN_STARTS,
    merge_radius: float | None = None,
    seed: int = 0,
) -> MinimaCensus:
    """Find every empirical local minimum with multistart projected descent.

    Projected gradient descent is run from scrambled Sobol points in the
    domain. Terminals on the boundary are excluded, the rest must be
    ``(1e-7, 1e-7)`` second-order stationary, and survivors are merged
    within `merge_radius` in order of risk. Each found minimum is then matched
    to the nearest unmatched population minimum within ``lam / (4 L2)``, or
    ``0.1 D`` when ``L2 = 0``.

    Parameters
    ----------
    spec : ProblemSpec
        The problem, of dimension at most three.
    S : Dataset
        The training set.
    starts : int, default=200
        The number of multistart runs, at least 200.
    merge_radius : float, optional
        Found minima closer than this are merged. Defaults to
        ``min(lam / (8 L2), 0.05 D)``.
    seed : int, default=0
        Seed of the Sobol scrambling.

    Returns
    -------
    MinimaCensus
        The census.

    Warns
    -----
    UserWarning
        If more than 5% of the runs did not converge.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if spec.d > GRID_DIMENSION_LIMIT:
        emsg = f"Require a dimension of at most {GRID_DIMENSION_LIMIT}, got {spec.d}."
        raise InputError(emsg)

    if starts < CENSUS_MIN_STARTS:
        emsg = f"Require at least {CENSUS_MIN_STARTS} starts, got {starts}."
        raise InputError(emsg)

    c = spec.constants
    if merge_radius is None:
        merge_radius = 0.05 * c.D if c.L2 == 0 else min(c.lam / (8 * c.L2), 0.05 * c.D)
    match_radius = 0.1 * c.D if c.L2 == 0 else c.lam / (4 * c.L2)

    points, risks = [], []
    unconverged = boundary = 0
    for w0 in _sobol_starts(spec.domain, starts, seed):
        w, converged = _descend(spec, S, project(spec.domain, w0), SOSP_TOL / 10)
        if spec.domain.on_boundary(w, 1e-8):
            boundary += 1
            continue
        if not converged:
            unconverged += 1
            continue
        g = empirical_grad(spec, w, S)
        if np.linalg.norm(g) <= SOSP_TOL and min_eigenvalue(
            empirical_hess(spec, w, S)
        ) >= -SOSP_TOL:
            points.append(w)
            risks.append(empirical_risk(spec, w, S))

    notes = []
    if unconverged > UNCONVERGED_LIMIT * starts:
        wmsg = (
            f"stabilab minima census left {unconverged} of {starts} runs "
            "unconverged, the census may be incomplete."
        )
        warnings.warn(wmsg, stacklevel=2)
        notes.append(wmsg)

    found: list[np.ndarray] = []
    found_risks: list[float] = []
    if points:
        stacked = np.asarray(points)
        columns = tuple(stacked[:, j] for j in reversed(range(spec.d)))
        keys = (*columns, np.asarray(risks))
        for index in np.lexsort(keys):
            candidate = stacked[index]
            if all(np.linalg.norm(candidate - kept) >= merge_radius for kept in found):
                found.append(candidate)
                found_risks.append(risks[index])

    matched: dict[int, tuple[int, float]] = {}
    unmatched: list[int] = []
    if found:
        distance, nearest = KDTree(spec.population_oracle.local_minima).query(
            np.asarray(found)
        )
        for index, (dist, k) in enumerate(zip(distance, nearest, strict=True)):
            if dist <= match_radius and int(k) not in matched:
                matched[int(k)] = (index, float(dist))
            else:
                unmatched.append(index)

    census = MinimaCensus(
        found_minima=np.asarray(found).reshape(-1, spec.d),
        found_risks=np.asarray(found_risks),
        matched=matched,
        unmatched_found=unmatched,
        starts_used=starts,
        K=spec.population_oracle.K,
        merge_radius=merge_radius,
        match_radius=match_radius,
        unconverged=unconverged,
        boundary_excluded=boundary,
        notes=tuple(notes),
    )
    logger.debug(
        "census found %d minima (%d boundary, %d unconverged), passed=%s",
        census.count,
        boundary,
        unconverged,
        census.passed,
    )
    return census


@dataclass(frozen=True)
class ErrorBoundReport:
    """Violations of the distance-to-minima error bound over qualifying probes."""

    samples: int
    candidates: int
    proof_factor: float
    statement_factor: float
    proof_violations: int
    statement_violations: int
    max_proof_ratio: float

    @property
    def passed(self) -> bool:
        """Whether the derived factor was never violated."""
        return self.proof_violations == 0


def _require_passed(census: MinimaCensus) -> None:
    if not census.passed:
        emsg = (
            f"Require a passed census, found {census.count} minima with "
            f"{len(census.matched)} of {census.K} matched."
        )
        raise InputError(emsg)


def _probe_candidates(
    spec: ProblemSpec,
    census: MinimaCensus,
    rng: np.random.Generator,
    count: int,
    radius: float,
) -> np.ndarray:
    local = count // 2
    centres = census.found_minima[rng.integers(0, census.count, size=local)]
    offsets = BallDomain(np.zeros(spec.d), radius).sample(rng, local)
    near = np.array([project(spec.domain, w) for w in centres + offsets])
    near = near.reshape(-1, spec.d)
    return np.concatenate([near, spec.domain.sample(rng, count - local)])


def error_bound_check(
    spec: ProblemSpec,
    S: Dataset,
    census: MinimaCensus,
    probes: int = 1000,
    seed: int = 0,
    *,
    points: ArrayLike | None = None,
    max_candidates: int | None = None,
) -> ErrorBoundReport:
    """Check ``||w - P(w)|| <= f ||grad R_S(w)||`` at qualifying probes.

    A probe qualifies when ``||grad R_S(w)|| < alpha^2 / (2 L0)`` and the
    smallest Hessian eigenvalue exceeds ``-lam / 2``. ``P(w)`` is the nearest
    census minimum. Violations are counted for the derived factor
    ``f = 2 / lam`` and the stated factor ``f = lam / 4``.

    Parameters
    ----------
    spec : ProblemSpec
        The problem.
    S : Dataset
        The training set.
    census : MinimaCensus
        A passed census of `S`.
    probes : int, default=1000
        The number of qualifying probes sought.
    seed : int, default=0
        Seed of the probe sampler.
    points : ArrayLike, optional
        Explicit probe points, checked without the qualifying filter.
    max_candidates : int, optional
        Candidate points drawn before giving up. Defaults to ``100 * probes``.

    Returns
    -------
    ErrorBoundReport
        Violation counts for both factors. Zero qualifying probes is not a
        failure.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    _require_passed(census)
    c = spec.constants
    lam = c.strict_saddle_lambda
    factors = error_bound_factors(c)
    tree = KDTree(census.found_minima)
    grad_limit = c.alpha**2 / (2 * c.L0)

    def measure(batch: np.ndarray, *, qualify: bool) -> tuple[np.ndarray, np.ndarray]:
        norms, dists = [], []
        for w in batch:
            grad_norm = float(np.linalg.norm(empirical_grad(spec, w, S)))
            if qualify and not (
                grad_norm < grad_limit
                and min_eigenvalue(empirical_hess(spec, w, S)) > -lam / 2
            ):
                continue
            norms.append(grad_norm)
            dists.append(float(tree.query(w)[0][0]))
        return np.asarray(norms), np.asarray(dists)

    if points is not None:
        batch = np.atleast_2d(np.asarray(points, dtype=np.float64))
        grad_norms, distances = measure(batch, qualify=False)
        candidates = batch.shape[0]
    else:
        if max_candidates is None:
            max_candidates = 100 * probes
        rng = make_rng(seed)
        radius = min(census.match_radius, 4 * grad_limit / lam)
        grad_norms, distances = np.empty(0), np.empty(0)
        candidates = 0
        while grad_norms.size < probes and candidates < max_candidates:
            size = min(4 * probes, max_candidates - candidates)
            norms, dists = measure(
                _probe_candidates(spec, census, rng, size, radius), qualify=True
            )
            grad_norms = np.concatenate([grad_norms, norms])
            distances = np.concatenate([distances, dists])
            candidates += size
        grad_norms, distances = grad_norms[:probes], distances[:probes]

    proof_bound = factors.proof * grad_norms
    ratios = np.divide(
        distances,
        proof_bound,
        out=np.where(distances > 0, np.inf, 0.0),
        where=proof_bound > 0,
    )

    report = ErrorBoundReport(
        samples=int(grad_norms.size),
        candidates=candidates,
        proof_factor=factors.proof,
        statement_factor=factors.statement,
        proof_violations=int(np.count_nonzero(distances > proof_bound)),
        statement_violations=int(
            np.count_nonzero(distances > factors.statement * grad_norms)
        ),
        max_proof_ratio=float(ratios.max()) if ratios.size else 0.0,
    )
    logger.debug("error bound check %r", report)
    return report


@dataclass(frozen=True)
class FieldReport:
    """Gradient norms and smallest Hessian eigenvalues over a domain grid."""

    points: np.ndarray
    grad_norms: np.ndarray
    min_eigs: np.ndarray
    alpha: float
    lam: float
    failing: np.ndarray

    @property
    def passed(self) -> bool:
        """Whether the strict-saddle implication held at every grid point."""
        return self.failing.size == 0

    def to_frame(self) -> pd.DataFrame:
        """Tabulate the field for plotting."""
        columns = [f"w{j}" for j in range(self.points.shape[1])]
        frame = pd.DataFrame(self.points, columns=columns)
        frame["grad_norm"] = self.grad_norms
        frame["min_eig"] = self.min_eigs
        return frame


def min_eig_field(
    spec: ProblemSpec,
    S: Dataset | None = None,
    grid_resolution: float | None = None,
    *,
    alpha: float | None = None,
    lam: float | None = None,
    slack: float = CERTIFY_MARGIN,
) -> FieldReport:
    """Evaluate the gradient norm and smallest Hessian eigenvalue on a grid.

    The strict-saddle implication ``||grad|| <= alpha`` implies
    ``|sigma_min| >= lam`` is checked at every point with `slack`, so a
    point fails when ``||grad|| <= (1 - slack) alpha`` and
    ``|sigma_min| < (1 - slack) lam``.

    Parameters
    ----------
    spec : ProblemSpec
        The problem, of dimension at most three.
    S : Dataset, optional
        The training set of the empirical risk. Defaults to the population
        risk.
    grid_resolution : float, optional
        The lattice spacing. Defaults to the certification resolution of the
        dimension.
    alpha : float, optional
        Gradient threshold. Defaults to the certified value.
    lam : float, optional
        Curvature threshold. Defaults to the certified strict-saddle value.
    slack : float, default=0.05
        Relative slack of both thresholds.

    Returns
    -------
    FieldReport
        The field and the failing grid points.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if spec.d > GRID_DIMENSION_LIMIT:
        emsg = f"Require a dimension of at most {GRID_DIMENSION_LIMIT}, got {spec.d}."
        raise InputError(emsg)

    c = spec.constants
    alpha = c.alpha if alpha is None else alpha
    lam = c.strict_saddle_lambda if lam is None else lam
    if grid_resolution is None:
        grid_resolution = DEFAULT_GRID_RESOLUTION[spec.d]

    grid = domain_grid(spec.domain, grid_resolution)
    if S is None:
        population = spec.population_oracle
        grads = np.array([population.grad(w) for w in grid])
        eigs = np.array([min_eigenvalue(population.hess(w)) for w in grid])
    else:
        grads = np.array([empirical_grad(spec, w, S) for w in grid])
        eigs = np.array([min_eigenvalue(empirical_hess(spec, w, S)) for w in grid])

    norms = np.linalg.norm(grads.reshape(grid.shape[0], -1), axis=1)
    failing = np.flatnonzero(
        (norms <= (1 - slack) * alpha) & (np.abs(eigs) < (1 - slack) * lam)
    )
    if failing.size:
        logger.debug("strict-saddle implication fails at %d grid points", failing.size)
    return FieldReport(grid, norms, eigs, alpha, lam, grid[failing])


def opt_gap_to_global(
    spec: ProblemSpec, S: Dataset, w: ArrayLike, census: MinimaCensus
) -> float:
    """Return the empirical risk gap of the census minimum nearest `w`.

    The gap is the empirical risk at the census minimum nearest to `w` less
    the smallest empirical risk over the census, so it is zero for a census
    of one minimum.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    _require_passed(census)
    w = as_param_vector(w, dimension=spec.d)
    _, nearest = KDTree(census.found_minima).query(w)
    risks = [empirical_risk(spec, m, S) for m in census.found_minima]
    return max(0.0, risks[int(nearest[0])] - min(risks))
