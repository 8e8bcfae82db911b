# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Synthetic problem families with hand-coded oracles.

Each family is a small picklable class whose bound methods serve as the
batched oracles of a :class:`~stabilab.problems.oracles.ProblemSpec`, so
specs may be shipped to worker processes unchanged.

Notes
-----
.. versionadded:: 0.1.0

"""

from __future__ import annotations

from collections.abc import Callable
import inspect
import itertools
import logging
from typing import TYPE_CHECKING, Any

import lazy_loader as lazy

from ..common import ConstructionError, InputError, make_rng, spawn_seeds
from ..core import BallDomain, ConstantsBundle, Dataset, ParamVector, project, unit_ball
from .certify import certify_constants
from .oracles import (
    FrozenSamplePopulation,
    OracleSet,
    PopulationMode,
    PopulationOracle,
    ProblemSpec,
    SampleOracle,
)

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    import numpy as np
    import scipy.optimize as sopt
    import scipy.special as ssp

# lazy import third-party dependencies
np = lazy.load("numpy")
sopt = lazy.load("scipy.optimize")
ssp = lazy.load("scipy.special")

__all__ = [
    "DOUBLE_WELL_MAX_DIMENSION",
    "LOGISTIC_RADIUS",
    "PROBLEM_BUILDERS",
    "DoubleWell",
    "LogisticBlobs",
    "QuadraticMean",
    "build_problem",
    "make_double_well",
    "make_logistic_blobs",
    "make_quadratic_mean",
]

logger = logging.getLogger(__name__)

BLOB_RADIUS: float = 1.0
"""Distance of every blob centre from the origin."""

DOUBLE_WELL_MAX_DIMENSION: int = 3
"""Largest double-well dimension with an enumerable set of minima."""

FEATURE_RADIUS: float = 3.0
"""Blob features are radially clipped to this norm."""

LOGISTIC_GRID_RESOLUTION: float = 0.25
"""Certification grid spacing for logistic problems of at most three parameters."""

LOGISTIC_RADIUS: float = 3.0
"""Radius of the logistic regression parameter ball."""

OFFSET_GRID: int = 1001
"""Number of radii scanned for the double-well loss offset."""

OFFSET_SLACK: float = 1e-12
"""Added to a non-zero double-well offset to absorb rounding."""


class QuadraticMean:
    """Mean estimation with ``f(w, z) = ||w - z||^2 / 2``.

    Samples are uniform on the ball of radius `noise_radius` around `mu`.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    def __init__(self, mu: ParamVector, noise_radius: float) -> None:
        self.mu = mu
        self.noise_radius = noise_radius
        self.d = int(mu.size)
        self.noise = BallDomain(center=mu, radius=noise_radius)
        # second moment of the uniform ball about its centre
        self.variance = noise_radius**2 * self.d / (self.d + 2)

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(d={self.d}, "
            f"noise_radius={self.noise_radius})"
        )

    def loss(self, w: ParamVector, Z: np.ndarray) -> np.ndarray:
        return 0.5 * np.sum((w - Z) ** 2, axis=1)

    def grad(self, w: ParamVector, Z: np.ndarray) -> np.ndarray:
        return w - Z

    def hess(self, w: ParamVector, Z: np.ndarray) -> np.ndarray:
        return np.broadcast_to(np.eye(self.d), (Z.shape[0], self.d, self.d))

    def risk(self, w: ParamVector) -> float:
        return 0.5 * float(np.sum((w - self.mu) ** 2)) + 0.5 * self.variance

    def population_grad(self, w: ParamVector) -> ParamVector:
        return np.asarray(w, dtype=np.float64) - self.mu

    def population_hess(self, w: ParamVector) -> np.ndarray:  # noqa: ARG002
        return np.eye(self.d)

    def fresh_sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return self.noise.sample(rng, count)

    def sampler(self, seed: int, n: int) -> Dataset:
        return Dataset(self.fresh_sample(make_rng(seed), n))

    def support_probe(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Return the axis extremes of the noise ball plus sphere points."""
        eye = np.eye(self.d)
        extremes = np.vstack(
            [self.mu + self.noise_radius * eye, self.mu - self.noise_radius * eye]
        )
        extra = max(count - extremes.shape[0], 0)
        directions = rng.standard_normal((extra, self.d))
        norms = np.linalg.norm(directions, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        sphere = self.mu + self.noise_radius * directions / norms
        return np.vstack([extremes, sphere])


def make_quadratic_mean(
    d: int,
    mu: ArrayLike | None = None,
    noise_radius: float = 1.0,
) -> ProblemSpec:
    """Build the convex mean-estimation problem.

    The per-sample loss is ``f(w, z) = ||w - z||^2 / 2`` with ``z`` uniform on
    the ball of radius `noise_radius` about `mu`, over the parameter ball of
    radius ``2 * noise_radius`` about the origin. The population risk is
    ``R(w) = ||w - mu||^2 / 2 + noise_radius^2 d / (2 (d + 2))`` with unique
    minimum `mu`, and the constants are known in closed form.

    Parameters
    ----------
    d : int
        The parameter dimension.
    mu : ArrayLike, optional
        The population mean. Defaults to the origin.
    noise_radius : float, default=1.0
        Radius of the sample distribution.

    Returns
    -------
    ProblemSpec
        The problem with analytic population oracle and constants.

    Notes
    -----
    .. versionadded:: 0.1.0

    Examples
    --------
    >>> spec = make_quadratic_mean(2)
    >>> spec.population_oracle.risk(spec.domain.center)
    0.25

    """
    if int(d) != d or d < 1:
        emsg = f"Require a positive integer dimension, got {d}."
        raise InputError(emsg)

    if not noise_radius > 0:
        emsg = f"Require a positive noise radius, got {noise_radius}."
        raise InputError(emsg)

    mu = np.zeros(d) if mu is None else np.array(mu, dtype=np.float64).reshape(-1)
    if mu.size != d:
        emsg = f"Require a mean of dimension {d}, got {mu.size}."
        raise InputError(emsg)

    mu_norm = float(np.linalg.norm(mu))
    if mu_norm > noise_radius:
        emsg = (
            f"Require ||mu|| <= noise_radius, got ||mu||={mu_norm} and "
            f"noise_radius={noise_radius}."
        )
        raise InputError(emsg)

    mu.setflags(write=False)
    family = QuadraticMean(mu, noise_radius)
    domain = BallDomain(center=np.zeros(d), radius=2 * noise_radius)

    L0 = 3 * noise_radius + mu_norm
    # the strict-saddle implication is vacuous, every curvature is one
    constants = ConstantsBundle(
        L0=L0,
        L1=1.0,
        L2=0.0,
        lam=1.0,
        alpha=L0,
        beta=None,
        M=0.5 * L0**2,
        D=domain.diameter,
        K=1,
    )

    spec = ProblemSpec(
        name="quadratic_mean",
        domain=domain,
        sample_oracle=SampleOracle(family.loss, family.grad, family.hess),
        population_oracle=PopulationOracle(
            risk=family.risk,
            grad=family.population_grad,
            hess=family.population_hess,
            local_minima=mu,
        ),
        sampler=family.sampler,
        constants=constants,
        fresh_sample=family.fresh_sample,
        support_probe=family.support_probe,
        empirical_minimizer=_ProjectedMean(domain),
        is_convex=True,
        params={"d": d, "mu": mu.tolist(), "noise_radius": noise_radius},
    )
    logger.debug("built %r", spec)
    return spec


class _ProjectedMean:
    """Closed form empirical minimum of the quadratic mean problem."""

    def __init__(self, domain: BallDomain) -> None:
        self.domain = domain

    def __call__(self, S: Dataset) -> ParamVector:
        return project(self.domain, np.mean(S.samples, axis=0))


def _double_well_offset(
    d: int, a: float, noise_scale: float, curvature_noise: float
) -> float:
    """Return a constant making the double-well loss non-negative.

    For ``||w|| = r`` the quartic is at least ``d (r^2/d - a^2)^2 / 4``, the
    linear noise at least ``-noise_scale r`` and the curvature noise at least
    ``-curvature_noise r^2 / 2``.
    """
    if noise_scale == 0 and curvature_noise == 0:
        return 0.0

    def lower(r: float) -> float:
        return (
            d / 4 * (r * r / d - a * a) ** 2
            - noise_scale * r
            - 0.5 * curvature_noise * r * r
        )

    radii = np.linspace(0.0, 1.0, OFFSET_GRID)
    values = np.array([lower(r) for r in radii])
    index = int(np.argmin(values))
    bracket = (radii[max(index - 1, 0)], radii[min(index + 1, OFFSET_GRID - 1)])
    result = sopt.minimize_scalar(lower, bounds=bracket, method="bounded")
    floor = min(float(values[index]), float(result.fun))
    return max(0.0, -floor) + OFFSET_SLACK


class DoubleWell:
    """Separable quartic wells with linear and curvature noise.

    A sample is encoded as the row ``[t, u_1, ..., u_d, s]``.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    def __init__(
        self,
        d: int,
        well_radius: float,
        noise_scale: float,
        curvature_noise: float,
        seed: int,
    ) -> None:
        self.d = d
        self.a = well_radius
        self.noise_scale = noise_scale
        self.curvature_noise = curvature_noise
        G = make_rng(seed).standard_normal((d, d))
        B = (G + G.T) / 2
        self.B = B / np.max(np.abs(np.linalg.eigvalsh(B)))
        self.offset = _double_well_offset(d, well_radius, noise_scale, curvature_noise)

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(d={self.d}, a={self.a}, "
            f"noise_scale={self.noise_scale}, curvature_noise={self.curvature_noise})"
        )

    def _split(self, Z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return Z[:, 0], Z[:, 1 : self.d + 1], Z[:, self.d + 1]

    def quartic(self, w: ParamVector) -> float:
        return float(np.sum(0.25 * (w**2 - self.a**2) ** 2))

    def loss(self, w: ParamVector, Z: np.ndarray) -> np.ndarray:
        t, u, s = self._split(Z)
        curvature = 0.5 * s * float(w @ self.B @ w)
        return self.quartic(w) + t * (u @ w) + curvature + self.offset

    def grad(self, w: ParamVector, Z: np.ndarray) -> np.ndarray:
        t, u, s = self._split(Z)
        return self.population_grad(w) + t[:, None] * u + s[:, None] * (self.B @ w)

    def hess(self, w: ParamVector, Z: np.ndarray) -> np.ndarray:
        _, _, s = self._split(Z)
        return self.population_hess(w) + s[:, None, None] * self.B

    def risk(self, w: ParamVector) -> float:
        return self.quartic(np.asarray(w, dtype=np.float64)) + self.offset

    def population_grad(self, w: ParamVector) -> ParamVector:
        w = np.asarray(w, dtype=np.float64)
        return w * (w**2 - self.a**2)

    def population_hess(self, w: ParamVector) -> np.ndarray:
        w = np.asarray(w, dtype=np.float64)
        return np.diag(3 * w**2 - self.a**2)

    def minima(self) -> np.ndarray:
        """Return the ``2^d`` sign patterns of ``(+-a, ..., +-a)``."""
        return np.array(list(itertools.product((self.a, -self.a), repeat=self.d)))

    def _directions(self, rng: np.random.Generator, count: int) -> np.ndarray:
        u = rng.standard_normal((count, self.d))
        norms = np.linalg.norm(u, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        return u / norms

    def fresh_sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        t = rng.uniform(-self.noise_scale, self.noise_scale, count)
        u = self._directions(rng, count)
        s = rng.uniform(-self.curvature_noise, self.curvature_noise, count)
        return np.column_stack([t, u, s])

    def sampler(self, seed: int, n: int) -> Dataset:
        return Dataset(self.fresh_sample(make_rng(seed), n))

    def support_probe(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Return every extreme ``(t, +-e_i, s)`` plus extreme random directions."""
        eye = np.eye(self.d)
        axes = np.vstack([eye, -eye])
        corners = [
            np.concatenate([[t], u, [s]])
            for t in (-self.noise_scale, self.noise_scale)
            for s in (-self.curvature_noise, self.curvature_noise)
            for u in axes
        ]
        extra = max(count - len(corners), 0)
        t = self.noise_scale * rng.choice([-1.0, 1.0], extra)
        s = self.curvature_noise * rng.choice([-1.0, 1.0], extra)
        random = np.column_stack([t, self._directions(rng, extra), s])
        return np.vstack([np.array(corners), random])


def make_double_well(
    d: int,
    well_radius: float = 0.5,
    noise_scale: float = 0.0,
    curvature_noise: float = 0.0,
    seed: int = 0,
    *,
    grid_resolution: float | None = None,
) -> ProblemSpec:
    """Build the non-convex strict-saddle problem on the unit ball.

    The per-sample loss is::

        f(w, z) = sum_i (w_i^2 - a^2)^2 / 4 + t <u, w> + s w^T B w / 2 + c0

    with ``a = well_radius``, ``t`` uniform on ``[-noise_scale, noise_scale]``,
    ``u`` uniform on the unit sphere, ``s`` uniform on
    ``[-curvature_noise, curvature_noise]``, ``B`` a fixed symmetric matrix
    of unit spectral norm drawn from `seed`, and ``c0`` a constant keeping
    the loss non-negative. The noise has zero mean, so the population risk
    is the quartic plus ``c0`` with ``2^d`` minima at the sign patterns
    ``(+-a, ..., +-a)``.

    Parameters
    ----------
    d : int
        The parameter dimension, at most three.
    well_radius : float, default=0.5
        Position ``a`` of the wells, ``0 < a <= 0.5``.
    noise_scale : float, default=0.0
        Half-width of the linear noise amplitude.
    curvature_noise : float, default=0.0
        Half-width of the curvature noise amplitude.
    seed : int, default=0
        Seed of the curvature noise matrix ``B``.
    grid_resolution : float, optional
        Certification grid spacing.

    Returns
    -------
    ProblemSpec
        The problem with analytic population oracle and certified constants.

    Raises
    ------
    ConstructionError
        If the certified boundary gradient floor ``beta`` is not positive.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if int(d) != d or not 1 <= d <= DOUBLE_WELL_MAX_DIMENSION:
        emsg = f"Require a double-well dimension between 1 and 3, got {d}."
        raise InputError(emsg)

    if not 0 < well_radius <= 0.5:
        emsg = f"Require 0 < well_radius <= 0.5, got {well_radius}."
        raise InputError(emsg)

    if noise_scale < 0 or curvature_noise < 0:
        emsg = (
            "Require non-negative noise parameters, got "
            f"noise_scale={noise_scale} and curvature_noise={curvature_noise}."
        )
        raise InputError(emsg)

    family = DoubleWell(int(d), well_radius, noise_scale, curvature_noise, seed)
    domain = unit_ball(int(d))
    sample_oracle = SampleOracle(family.loss, family.grad, family.hess)
    population = PopulationOracle(
        risk=family.risk,
        grad=family.population_grad,
        hess=family.population_hess,
        local_minima=family.minima(),
    )

    oracles = OracleSet(
        "double_well", domain, sample_oracle, population, family.support_probe
    )
    constants = certify_constants(
        oracles, grid_resolution, seed=seed, require_beta=True
    )

    spec = ProblemSpec(
        name="double_well",
        domain=domain,
        sample_oracle=sample_oracle,
        population_oracle=population,
        sampler=family.sampler,
        constants=constants,
        fresh_sample=family.fresh_sample,
        support_probe=family.support_probe,
        params={
            "d": int(d),
            "well_radius": well_radius,
            "noise_scale": noise_scale,
            "curvature_noise": curvature_noise,
            "seed": seed,
        },
    )
    logger.debug("built %r with offset %.3e", spec, family.offset)
    return spec


class LogisticBlobs:
    """Multi-class logistic regression on Gaussian blobs.

    The parameter vector flattens a ``(classes - 1, d)`` weight matrix in
    row-major order, the last class holding a fixed zero logit. A sample is
    encoded as the row ``[x_1, ..., x_d, y]``.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    def __init__(self, classes: int, d: int, seed: int) -> None:
        self.classes = classes
        self.d = d
        directions = make_rng(seed).standard_normal((classes, d))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        self.centers = BLOB_RADIUS * directions

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(classes={self.classes}, d={self.d})"

    @property
    def p(self) -> int:
        """The number of parameters."""
        return (self.classes - 1) * self.d

    def _logits(self, w: ParamVector, X: np.ndarray) -> np.ndarray:
        W = np.asarray(w, dtype=np.float64).reshape(self.classes - 1, self.d)
        return np.column_stack([X @ W.T, np.zeros(X.shape[0])])

    def _split(self, Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return Z[:, : self.d], Z[:, self.d].astype(np.intp)

    def loss(self, w: ParamVector, Z: np.ndarray) -> np.ndarray:
        X, y = self._split(Z)
        logits = self._logits(w, X)
        return ssp.logsumexp(logits, axis=1) - logits[np.arange(y.size), y]

    def grad(self, w: ParamVector, Z: np.ndarray) -> np.ndarray:
        X, y = self._split(Z)
        probs = ssp.softmax(self._logits(w, X), axis=1)
        probs[np.arange(y.size), y] -= 1.0
        return np.einsum("mk,mi->mki", probs[:, :-1], X).reshape(y.size, self.p)

    def hess(self, w: ParamVector, Z: np.ndarray) -> np.ndarray:
        X, _ = self._split(Z)
        probs = ssp.softmax(self._logits(w, X), axis=1)[:, :-1]
        diagonal = np.einsum("mk,kl->mkl", probs, np.eye(self.classes - 1))
        curvature = diagonal - np.einsum("mk,ml->mkl", probs, probs)
        blocks = np.einsum("mkl,mi,mj->mkilj", curvature, X, X)
        return blocks.reshape(X.shape[0], self.p, self.p)

    def fresh_sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        y = rng.integers(0, self.classes, count)
        X = self.centers[y] + rng.standard_normal((count, self.d))
        norms = np.linalg.norm(X, axis=1, keepdims=True)
        X *= FEATURE_RADIUS / np.maximum(norms, FEATURE_RADIUS)
        return np.column_stack([X, y.astype(np.float64)])

    def sampler(self, seed: int, n: int) -> Dataset:
        return Dataset(self.fresh_sample(make_rng(seed), n))

    def support_probe(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Return every class at features of maximal norm."""
        eye = np.eye(self.d)
        axes = np.vstack([eye, -eye]) * FEATURE_RADIUS
        rows = [np.append(x, y) for y in range(self.classes) for x in axes]
        extra = max(count - len(rows), 0)
        directions = rng.standard_normal((extra, self.d))
        norms = np.linalg.norm(directions, axis=1, keepdims=True)
        directions /= np.maximum(norms, 1e-300)
        y = rng.integers(0, self.classes, extra).astype(np.float64)
        random = np.column_stack([FEATURE_RADIUS * directions, y])
        return np.vstack([np.array(rows), random])


class _ConstrainedMinimizer:
    """Empirical minimum of a convex problem over a centred ball."""

    def __init__(self, oracle: SampleOracle, domain: BallDomain) -> None:
        self.oracle = oracle
        self.domain = domain

    def __call__(self, S: Dataset) -> ParamVector:
        return _minimize_over_ball(
            lambda w: float(np.mean(self.oracle.loss_fn(w, S.samples))),
            lambda w: np.mean(self.oracle.grad_fn(w, S.samples), axis=0),
            lambda w: np.mean(self.oracle.hess_fn(w, S.samples), axis=0),
            self.domain,
        )


def _minimize_over_ball(
    fun: Callable[[ParamVector], float],
    jac: Callable[[ParamVector], ParamVector],
    hess: Callable[[ParamVector], np.ndarray],
    domain: BallDomain,
) -> ParamVector:
    x0 = np.array(domain.center, dtype=np.float64)
    result = sopt.minimize(fun, x0, jac=jac, hess=hess, method="trust-exact")
    if domain.contains(result.x):
        return np.asarray(result.x, dtype=np.float64)

    # the unconstrained minimum left the ball, so constrain it
    radius2 = domain.radius**2
    constraint = {
        "type": "ineq",
        "fun": lambda w: radius2 - float(np.sum((w - domain.center) ** 2)),
        "jac": lambda w: -2 * (w - domain.center),
    }
    result = sopt.minimize(
        fun,
        x0,
        jac=jac,
        method="SLSQP",
        constraints=[constraint],
        options={"ftol": 1e-14},
    )
    return project(domain, result.x)


def make_logistic_blobs(
    classes: int = 3,
    d: int = 3,
    n_population_oracle: int = 2048,
    seed: int = 0,
    *,
    grid_resolution: float | None = None,
) -> ProblemSpec:
    """Build the convex multi-class logistic regression problem.

    Features are drawn from unit-variance Gaussian blobs centred on a sphere
    of radius one, one blob per class with uniform class labels, and clipped
    to norm three. The parameter ball has radius three. The population
    oracle is a frozen Monte-Carlo estimate over `n_population_oracle`
    held-out samples and the constants are certified numerically.

    Parameters
    ----------
    classes : int, default=3
        The number of classes, at least two.
    d : int, default=3
        The feature dimension, at least `classes`.
    n_population_oracle : int, default=2048
        The frozen held-out sample size.
    seed : int, default=0
        Seed of the blob centres, the held-out sample and certification.
    grid_resolution : float, optional
        Certification grid spacing when there are at most three parameters.

    Returns
    -------
    ProblemSpec
        The problem with Monte-Carlo population oracle.

    Raises
    ------
    ConstructionError
        If the population minimum lies outside the parameter ball.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if int(classes) != classes or classes < 2:
        emsg = f"Require at least 2 classes, got {classes}."
        raise InputError(emsg)

    if int(d) != d or d < classes:
        emsg = f"Require a feature dimension of at least {classes}, got {d}."
        raise InputError(emsg)

    if n_population_oracle < 2:
        emsg = f"Require at least 2 population samples, got {n_population_oracle}."
        raise InputError(emsg)

    family = LogisticBlobs(int(classes), int(d), seed)
    domain = BallDomain(center=np.zeros(family.p), radius=LOGISTIC_RADIUS)
    sample_oracle = SampleOracle(family.loss, family.grad, family.hess)

    population_seed, certify_seed = spawn_seeds(seed, 2)
    held_out = family.fresh_sample(make_rng(population_seed), n_population_oracle)
    frozen = FrozenSamplePopulation(sample_oracle, held_out)
    w_star = _minimize_over_ball(frozen.risk, frozen.grad, frozen.hess, domain)
    if domain.on_boundary(w_star, 1e-9):
        emsg = (
            f"Population minimum of logistic_blobs lies outside the ball of radius "
            f"{LOGISTIC_RADIUS}, choose another seed."
        )
        raise ConstructionError(emsg)

    population = PopulationOracle(
        risk=frozen.risk,
        grad=frozen.grad,
        hess=frozen.hess,
        local_minima=w_star,
        mode=PopulationMode.MONTE_CARLO,
        sample_count=n_population_oracle,
        seed=population_seed,
        risk_std_error=frozen.risk_std_error,
    )

    if grid_resolution is None and family.p <= DOUBLE_WELL_MAX_DIMENSION:
        grid_resolution = LOGISTIC_GRID_RESOLUTION

    oracles = OracleSet(
        "logistic_blobs", domain, sample_oracle, population, family.support_probe
    )
    constants = certify_constants(oracles, grid_resolution, seed=certify_seed)

    spec = ProblemSpec(
        name="logistic_blobs",
        domain=domain,
        sample_oracle=sample_oracle,
        population_oracle=population,
        sampler=family.sampler,
        constants=constants,
        fresh_sample=family.fresh_sample,
        support_probe=family.support_probe,
        empirical_minimizer=_ConstrainedMinimizer(sample_oracle, domain),
        is_convex=True,
        params={
            "classes": int(classes),
            "d": int(d),
            "n_population_oracle": n_population_oracle,
            "seed": seed,
        },
    )
    logger.debug("built %r with |w*|=%.3f", spec, float(np.linalg.norm(w_star)))
    return spec


PROBLEM_BUILDERS: dict[str, Callable[..., ProblemSpec]] = {
    "quadratic_mean": make_quadratic_mean,
    "double_well": make_double_well,
    "logistic_blobs": make_logistic_blobs,
}
"""Problem family builders keyed by configuration name."""


def build_problem(name: str, params: dict[str, Any] | None = None) -> ProblemSpec:
    """Build a problem from its family name and parameter map.

    Parameters
    ----------
    name : str
        A key of :data:`PROBLEM_BUILDERS`.
    params : dict, optional
        Keyword arguments of the family builder.

    Returns
    -------
    ProblemSpec
        The problem.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if name not in PROBLEM_BUILDERS:
        options = ", ".join(f"{key!r}" for key in PROBLEM_BUILDERS)
        emsg = f"Unknown problem {name!r}, expected one of {options}."
        raise InputError(emsg)

    builder = PROBLEM_BUILDERS[name]
    params = {} if params is None else dict(params)
    try:
        inspect.signature(builder).bind(**params)
    except TypeError as err:
        emsg = f"Invalid parameters for problem {name!r}: {err}."
        raise InputError(emsg) from err

    return builder(**params)
