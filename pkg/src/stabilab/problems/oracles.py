# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Loss oracles, problem specifications and empirical risk evaluation.

Per-sample oracles are vectorized over samples: called with a ``(m, q)``
array of samples they return ``(m,)`` losses, ``(m, d)`` gradients and
``(m, d, d)`` Hessians, and called with a single ``(q,)`` sample they return
a scalar, a vector and a matrix.

Notes
-----
.. versionadded:: 0.1.0

"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field, replace
import logging
from typing import TYPE_CHECKING, Any, NamedTuple

import lazy_loader as lazy

from ..common import InputError, StrEnumPlus, make_rng
from ..core import BallDomain, ConstantsBundle, Dataset, ParamVector, as_param_vector

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    import numpy as np

# lazy import third-party dependencies
np = lazy.load("numpy")

__all__ = [
    "FD_GRAD_RTOL",
    "FD_HESS_RTOL",
    "FiniteDifferenceReport",
    "FrozenSamplePopulation",
    "OracleSet",
    "PopulationMode",
    "PopulationOracle",
    "ProblemSpec",
    "SampleOracle",
    "empirical_grad",
    "empirical_hess",
    "empirical_risk",
    "finite_difference_check",
    "monte_carlo_population",
]

logger = logging.getLogger(__name__)

FD_GRAD_RTOL: float = 1e-5
"""Relative tolerance of the gradient against central differences of the loss."""

FD_HESS_RTOL: float = 1e-4
"""Relative tolerance of the Hessian against central differences of the gradient."""

FD_STEP: float = 1e-5
"""Central difference step."""

type BatchFn = Callable[[ParamVector, np.ndarray], np.ndarray]


class PopulationMode(StrEnumPlus):
    """Enumeration of population oracle evaluation modes.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    ANALYTIC = "analytic"
    MONTE_CARLO = "monte_carlo"


def _batched(fn: BatchFn, w: ArrayLike, z: ArrayLike) -> Any:
    samples = np.asarray(z, dtype=np.float64)
    single = samples.ndim == 1
    result = fn(np.asarray(w, dtype=np.float64), np.atleast_2d(samples))
    return result[0] if single else result


@dataclass(frozen=True)
class SampleOracle:
    """Per-sample loss, gradient and Hessian of ``f(w, z)``.

    Parameters
    ----------
    loss_fn : callable
        Batched loss ``(w, Z) -> (m,)``.
    grad_fn : callable
        Batched gradient ``(w, Z) -> (m, d)``.
    hess_fn : callable
        Batched Hessian ``(w, Z) -> (m, d, d)``.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    loss_fn: BatchFn
    grad_fn: BatchFn
    hess_fn: BatchFn

    def loss(self, w: ArrayLike, z: ArrayLike) -> Any:
        """Evaluate the loss for one sample or a batch of samples."""
        return _batched(self.loss_fn, w, z)

    def grad(self, w: ArrayLike, z: ArrayLike) -> Any:
        """Evaluate the gradient for one sample or a batch of samples."""
        return _batched(self.grad_fn, w, z)

    def hess(self, w: ArrayLike, z: ArrayLike) -> Any:
        """Evaluate the Hessian for one sample or a batch of samples."""
        return _batched(self.hess_fn, w, z)


@dataclass(frozen=True, eq=False)
class PopulationOracle:
    """Population risk ``R(w) = E_z f(w, z)`` and its known local minima.

    Parameters
    ----------
    risk : callable
        ``w -> R(w)``.
    grad : callable
        ``w -> grad R(w)``.
    hess : callable
        ``w -> hess R(w)``.
    local_minima : ndarray
        Array of shape ``(K, d)`` of population local minima.
    global_min_index : int
        Row of `local_minima` with the smallest risk.
    mode : PopulationMode
        Whether the oracle is closed form or a frozen Monte-Carlo estimate.
    sample_count : int, optional
        Size of the frozen Monte-Carlo sample.
    seed : int, optional
        Seed of the frozen Monte-Carlo sample.
    risk_std_error : callable, optional
        ``w -> standard error`` of a Monte-Carlo risk estimate.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    risk: Callable[[ParamVector], float]
    grad: Callable[[ParamVector], ParamVector]
    hess: Callable[[ParamVector], np.ndarray]
    local_minima: np.ndarray
    global_min_index: int = 0
    mode: PopulationMode = PopulationMode.ANALYTIC
    sample_count: int | None = None
    seed: int | None = None
    risk_std_error: Callable[[ParamVector], float] | None = None

    def __post_init__(self) -> None:
        minima = np.array(self.local_minima, dtype=np.float64, ndmin=2)
        minima.setflags(write=False)
        object.__setattr__(self, "local_minima", minima)

        if not 0 <= self.global_min_index < minima.shape[0]:
            emsg = (
                f"Global minimum index {self.global_min_index} out of range for "
                f"{minima.shape[0]} local minima."
            )
            raise InputError(emsg)

    @property
    def K(self) -> int:
        """The number of population local minima."""
        return int(self.local_minima.shape[0])

    @property
    def global_minimum(self) -> ParamVector:
        """The population global minimum ``w*``."""
        return self.local_minima[self.global_min_index].copy()


class FrozenSamplePopulation:
    """Monte-Carlo population oracle over a frozen held-out sample.

    Parameters
    ----------
    sample_oracle : SampleOracle
        The per-sample oracle being averaged.
    samples : ndarray
        The frozen held-out samples.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    def __init__(self, sample_oracle: SampleOracle, samples: np.ndarray) -> None:
        self.sample_oracle = sample_oracle
        self.samples = np.asarray(samples, dtype=np.float64)
        self.samples.setflags(write=False)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(sample_count={self.samples.shape[0]})"

    def risk(self, w: ParamVector) -> float:
        """Return the frozen-sample mean loss."""
        return float(np.mean(self.sample_oracle.loss_fn(w, self.samples)))

    def grad(self, w: ParamVector) -> ParamVector:
        """Return the frozen-sample mean gradient."""
        return np.mean(self.sample_oracle.grad_fn(w, self.samples), axis=0)

    def hess(self, w: ParamVector) -> np.ndarray:
        """Return the frozen-sample mean Hessian."""
        return np.mean(self.sample_oracle.hess_fn(w, self.samples), axis=0)

    def risk_std_error(self, w: ParamVector) -> float:
        """Return the standard error of :meth:`risk`."""
        losses = self.sample_oracle.loss_fn(w, self.samples)
        return float(np.std(losses, ddof=1) / np.sqrt(losses.size))


class OracleSet(NamedTuple):
    """The oracles of a problem whose constants are not yet certified."""

    name: str
    domain: BallDomain
    sample_oracle: SampleOracle
    population_oracle: PopulationOracle
    support_probe: Callable[[np.random.Generator, int], np.ndarray]


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """A synthetic learning problem with per-sample and population oracles.

    Parameters
    ----------
    name : str
        The problem family identifier.
    domain : BallDomain
        The parameter space.
    sample_oracle : SampleOracle
        Per-sample loss oracle.
    population_oracle : PopulationOracle
        Population risk oracle and known minima.
    sampler : callable
        ``(seed, n) -> Dataset`` drawing i.i.d. training samples.
    constants : ConstantsBundle
        The problem constants.
    fresh_sample : callable
        ``(rng, count) -> ndarray`` drawing i.i.d. samples from a stream.
    support_probe : callable
        ``(rng, count) -> ndarray`` covering the sample support, extremes
        included, for certification.
    empirical_minimizer : callable, optional
        ``Dataset -> ParamVector`` closed form empirical minimum, when known.
    is_convex : bool, default=False
        Whether the per-sample loss is convex in ``w``.
    params : dict, optional
        The construction parameters.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    name: str
    domain: BallDomain
    sample_oracle: SampleOracle
    population_oracle: PopulationOracle
    sampler: Callable[[int, int], Dataset]
    constants: ConstantsBundle
    fresh_sample: Callable[[np.random.Generator, int], np.ndarray]
    support_probe: Callable[[np.random.Generator, int], np.ndarray]
    empirical_minimizer: Callable[[Dataset], ParamVector] | None = None
    is_convex: bool = False
    params: dict[str, Any] = field(default_factory=dict)

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(name={self.name!r}, d={self.d}, "
            f"K={self.population_oracle.K})"
        )

    @property
    def d(self) -> int:
        """The parameter space dimension."""
        return self.domain.dimension

    def sample(self, seed: int, n: int) -> Dataset:
        """Draw a training set of `n` samples from `seed`."""
        return self.sampler(seed, n)

    def with_population(self, oracle: PopulationOracle) -> ProblemSpec:
        """Return a copy using another population oracle."""
        return replace(self, population_oracle=oracle)

    def with_constants(self, constants: ConstantsBundle) -> ProblemSpec:
        """Return a copy using another constants bundle."""
        return replace(self, constants=constants)


def _check(spec: ProblemSpec, w: ArrayLike, S: Dataset) -> ParamVector:
    if not isinstance(S, Dataset) or S.n < 1:
        emsg = "Require a non-empty dataset."
        raise InputError(emsg)
    return as_param_vector(w, dimension=spec.d)


def empirical_risk(spec: ProblemSpec, w: ArrayLike, S: Dataset) -> float:
    """Evaluate the empirical risk ``R_S(w) = (1/n) sum_i f(w, z_i)``.

    Parameters
    ----------
    spec : ProblemSpec
        The problem.
    w : ArrayLike
        The parameter vector.
    S : Dataset
        The training set.

    Returns
    -------
    float
        The empirical risk.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    w = _check(spec, w, S)
    return float(np.mean(spec.sample_oracle.loss_fn(w, S.samples)))


def empirical_grad(spec: ProblemSpec, w: ArrayLike, S: Dataset) -> ParamVector:
    """Evaluate the empirical risk gradient at `w`."""
    w = _check(spec, w, S)
    return np.mean(spec.sample_oracle.grad_fn(w, S.samples), axis=0)


def empirical_hess(spec: ProblemSpec, w: ArrayLike, S: Dataset) -> np.ndarray:
    """Evaluate the empirical risk Hessian at `w`."""
    w = _check(spec, w, S)
    return np.mean(spec.sample_oracle.hess_fn(w, S.samples), axis=0)


def monte_carlo_population(
    spec: ProblemSpec,
    *,
    sample_count: int,
    seed: int,
    local_minima: ArrayLike | None = None,
    global_min_index: int | None = None,
) -> PopulationOracle:
    """Build a frozen Monte-Carlo population oracle for a problem.

    Parameters
    ----------
    spec : ProblemSpec
        The problem providing the per-sample oracle and sample distribution.
    sample_count : int
        Size of the frozen held-out sample.
    seed : int
        Seed of the frozen held-out sample.
    local_minima : ArrayLike, optional
        The population minima. Defaults to those of `spec`.
    global_min_index : int, optional
        Row of the global minimum. Defaults to that of `spec`.

    Returns
    -------
    PopulationOracle
        Oracle in :attr:`PopulationMode.MONTE_CARLO` mode.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if sample_count < 2:
        emsg = f"Require at least 2 Monte-Carlo samples, got {sample_count}."
        raise InputError(emsg)

    samples = spec.fresh_sample(make_rng(seed), sample_count)
    frozen = FrozenSamplePopulation(spec.sample_oracle, samples)

    if local_minima is None:
        local_minima = spec.population_oracle.local_minima
    if global_min_index is None:
        global_min_index = spec.population_oracle.global_min_index

    logger.debug("froze %d Monte-Carlo samples for %s", sample_count, spec.name)

    return PopulationOracle(
        risk=frozen.risk,
        grad=frozen.grad,
        hess=frozen.hess,
        local_minima=np.asarray(local_minima),
        global_min_index=global_min_index,
        mode=PopulationMode.MONTE_CARLO,
        sample_count=sample_count,
        seed=seed,
        risk_std_error=frozen.risk_std_error,
    )


class FiniteDifferenceReport(NamedTuple):
    """Worst relative oracle errors against central differences."""

    grad_rel_error: float
    hess_rel_error: float
    points: int

    @property
    def passed(self) -> bool:
        """Whether both errors are within their relative tolerances."""
        grad_ok = self.grad_rel_error <= FD_GRAD_RTOL
        return grad_ok and self.hess_rel_error <= FD_HESS_RTOL


def _rel_error(approx: np.ndarray, exact: np.ndarray) -> float:
    scale = max(float(np.linalg.norm(exact)), 1.0)
    return float(np.linalg.norm(approx - exact)) / scale


def finite_difference_check(
    spec: ProblemSpec,
    *,
    points: int = 100,
    samples_per_point: int = 4,
    seed: int = 0,
    step: float | None = None,
) -> FiniteDifferenceReport:
    """Compare oracle derivatives against central finite differences.

    Interior points are drawn uniformly from the domain shrunk by 10%, and
    the relative error is measured as ``||approx - exact|| / max(||exact||, 1)``.

    Parameters
    ----------
    spec : ProblemSpec
        The problem whose sample oracle is checked.
    points : int, default=100
        The number of random interior points.
    samples_per_point : int, default=4
        The number of fresh samples checked at each point.
    seed : int, default=0
        Seed of the point and sample streams.
    step : float, optional
        The central difference step. Defaults to :data:`FD_STEP`.

    Returns
    -------
    FiniteDifferenceReport
        The worst gradient and Hessian relative errors.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if step is None:
        step = FD_STEP

    rng = make_rng(seed)
    domain = spec.domain
    centers = domain.center + 0.9 * (domain.sample(rng, points) - domain.center)
    oracle = spec.sample_oracle
    eye = np.eye(spec.d)

    grad_error = hess_error = 0.0
    for w in centers:
        Z = spec.fresh_sample(rng, samples_per_point)
        grads = oracle.grad_fn(w, Z)
        hessians = oracle.hess_fn(w, Z)
        fd_grads = np.empty_like(grads)
        fd_hessians = np.empty_like(hessians)
        for j in range(spec.d):
            upper, lower = w + step * eye[j], w - step * eye[j]
            fd_grads[:, j] = (oracle.loss_fn(upper, Z) - oracle.loss_fn(lower, Z)) / (
                2 * step
            )
            fd_hessians[:, :, j] = (
                oracle.grad_fn(upper, Z) - oracle.grad_fn(lower, Z)
            ) / (2 * step)
        for i in range(Z.shape[0]):
            grad_error = max(grad_error, _rel_error(fd_grads[i], grads[i]))
            hess_error = max(hess_error, _rel_error(fd_hessians[i], hessians[i]))

    return FiniteDifferenceReport(grad_error, hess_error, points)
