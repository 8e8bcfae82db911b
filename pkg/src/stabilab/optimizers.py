# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Projected gradient descent, projected SGD and saddle-escaping PGD.

All optimizers operate on the empirical risk of a dataset over the ball
domain of a problem, keep every iterate inside the closed ball and are
deterministic given their seeds.

Notes
-----
.. versionadded:: 0.1.0

"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math
from typing import TYPE_CHECKING, NamedTuple
import warnings

import lazy_loader as lazy

from .common import (
    BOUNDARY_TOL,
    DEFAULT_STEP_CAP,
    Algorithm,
    HaltReason,
    InputError,
    OptimizationError,
    make_rng,
)
from .core import (
    ConstantsBundle,
    ParamVector,
    as_param_vector,
    project,
    smallest_eigenpair,
)

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    import numpy as np

    from .core import Dataset
    from .problems import ProblemSpec

# lazy import third-party dependencies
np = lazy.load("numpy")

__all__ = [
    "DESCENT_SLACK",
    "Branch",
    "PgdConfig",
    "SospCheck",
    "Trace",
    "check_sosp",
    "gd_step_size",
    "largest_admissible_epsilon",
    "negative_curvature_step",
    "run_gd",
    "run_pgd_sosp",
    "run_sgd",
    "sgd_step_size",
]

logger = logging.getLogger(__name__)

DESCENT_SLACK: float = 1e-12
"""Relative rounding allowance of the per-step descent assertion."""


class Branch(NamedTuple):
    """Per-branch step counts of a saddle-escaping PGD run."""

    gradient: int = 0
    boundary: int = 0
    curvature: int = 0


@dataclass(frozen=True, eq=False)
class Trace:
    """Recorded iterates of one optimizer run.

    Parameters
    ----------
    algorithm : Algorithm
        The optimizer that produced the trace.
    iterates : ndarray
        Recorded iterates of shape ``(k, d)``.
    recorded_steps : ndarray
        Step index of every recorded iterate.
    empirical_risks : ndarray
        Empirical risk at every recorded iterate.
    grad_norms : ndarray
        Empirical gradient norm at every recorded iterate.
    step_count : int
        The number of updates performed.
    terminal : ndarray
        The final iterate.
    rng_seed : int, optional
        Seed of the index stream, for stochastic optimizers.
    halt_reason : HaltReason
        Why the run stopped.
    branches : Branch
        Per-branch step counts, for saddle-escaping PGD.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    algorithm: Algorithm
    iterates: np.ndarray
    recorded_steps: np.ndarray
    empirical_risks: np.ndarray
    grad_norms: np.ndarray
    step_count: int
    terminal: ParamVector
    rng_seed: int | None = None
    halt_reason: HaltReason = HaltReason.COMPLETED
    branches: Branch = field(default_factory=Branch)

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(algorithm={self.algorithm}, "
            f"steps={self.step_count}, halt_reason={self.halt_reason})"
        )


class _Objective:
    """Empirical risk, gradient and Hessian of a fixed dataset."""

    def __init__(self, spec: ProblemSpec, S: Dataset) -> None:
        self.oracle = spec.sample_oracle
        self.samples = S.samples

    def risk(self, w: ParamVector) -> float:
        return float(np.mean(self.oracle.loss_fn(w, self.samples)))

    def grad(self, w: ParamVector) -> ParamVector:
        g = np.mean(self.oracle.grad_fn(w, self.samples), axis=0)
        if not np.all(np.isfinite(g)):
            emsg = f"Non-finite empirical gradient at {w.tolist()}."
            raise OptimizationError(emsg, grad_norm=float("nan"))
        return g

    def hess(self, w: ParamVector) -> np.ndarray:
        return np.mean(self.oracle.hess_fn(w, self.samples), axis=0)


class _Recorder:
    def __init__(self, stride: int) -> None:
        if stride < 1:
            emsg = f"Require a positive record stride, got {stride}."
            raise InputError(emsg)
        self.stride = stride
        self.iterates: list[ParamVector] = []
        self.steps: list[int] = []
        self.risks: list[float] = []
        self.grad_norms: list[float] = []

    def due(self, step: int) -> bool:
        return step % self.stride == 0

    def record(self, step: int, w: ParamVector, risk: float, grad_norm: float) -> None:
        if self.steps and self.steps[-1] == step:
            return
        self.iterates.append(w.copy())
        self.steps.append(step)
        self.risks.append(risk)
        self.grad_norms.append(grad_norm)

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "iterates": np.array(self.iterates),
            "recorded_steps": np.array(self.steps, dtype=np.int64),
            "empirical_risks": np.array(self.risks),
            "grad_norms": np.array(self.grad_norms),
        }


def _start(spec: ProblemSpec, w0: ArrayLike) -> ParamVector:
    w = as_param_vector(w0, dimension=spec.d)
    if not spec.domain.contains(w, atol=BOUNDARY_TOL):
        emsg = f"Require a starting point inside the domain, got {w.tolist()}."
        raise InputError(emsg)
    return project(spec.domain, w)


def gd_step_size(constants: ConstantsBundle) -> float:
    """Return the gradient descent step size ``1 / L1``."""
    return 1.0 / constants.L1


def sgd_step_size(constants: ConstantsBundle, t: int) -> float:
    """Return the SGD step size ``D / (L1 sqrt(t + 1))`` of step `t`."""
    return constants.D / (constants.L1 * math.sqrt(t + 1))


def run_gd(
    spec: ProblemSpec,
    S: Dataset,
    w0: ArrayLike,
    steps: int,
    *,
    record_stride: int = 1,
) -> Trace:
    """Run projected gradient descent with step size ``1 / L1``.

    Every step is checked to not increase the empirical risk.

    Parameters
    ----------
    spec : ProblemSpec
        The problem.
    S : Dataset
        The training set.
    w0 : ArrayLike
        The starting point, inside the domain.
    steps : int
        The number of updates, at least one.
    record_stride : int, default=1
        Record every `record_stride`-th iterate. The terminal iterate is
        always recorded.

    Returns
    -------
    Trace
        The recorded run.

    Raises
    ------
    OptimizationError
        If a gradient is not finite or a step increases the empirical risk.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if steps < 1:
        emsg = f"Require at least one step, got {steps}."
        raise InputError(emsg)

    objective = _Objective(spec, S)
    recorder = _Recorder(record_stride)
    eta = gd_step_size(spec.constants)
    w = _start(spec, w0)
    risk = objective.risk(w)

    for t in range(steps):
        g = objective.grad(w)
        if recorder.due(t):
            recorder.record(t, w, risk, float(np.linalg.norm(g)))
        w = project(spec.domain, w - eta * g)
        updated = objective.risk(w)
        if updated > risk + DESCENT_SLACK * (1 + abs(risk)):
            emsg = (
                f"Gradient descent increased the empirical risk at step {t} from "
                f"{risk!r} to {updated!r}, L1={spec.constants.L1} is too small."
            )
            raise OptimizationError(emsg, grad_norm=float(np.linalg.norm(g)))
        risk = updated

    recorder.record(steps, w, risk, float(np.linalg.norm(objective.grad(w))))
    logger.debug("gd finished %d steps at risk %.6e", steps, risk)
    return Trace(
        algorithm=Algorithm.GD, step_count=steps, terminal=w, **recorder.arrays()
    )


def run_sgd(
    spec: ProblemSpec,
    S: Dataset,
    w0: ArrayLike,
    steps: int,
    seed: int,
    *,
    record_stride: int = 1,
) -> Trace:
    """Run projected SGD with step size ``D / (L1 sqrt(t + 1))``.

    Sample indices are drawn uniformly with replacement from the seeded
    stream, so the trace is determined by `seed`, `S` and `w0`.

    Parameters
    ----------
    spec : ProblemSpec
        The problem.
    S : Dataset
        The training set.
    w0 : ArrayLike
        The starting point, inside the domain.
    steps : int
        The number of updates, at least one.
    seed : int
        Seed of the sample index stream.
    record_stride : int, default=1
        Record every `record_stride`-th iterate. The terminal iterate is
        always recorded.

    Returns
    -------
    Trace
        The recorded run.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if steps < 1:
        emsg = f"Require at least one step, got {steps}."
        raise InputError(emsg)

    objective = _Objective(spec, S)
    recorder = _Recorder(record_stride)
    grad_fn = spec.sample_oracle.grad_fn
    indices = make_rng(seed).integers(0, S.n, size=steps)
    w = _start(spec, w0)

    for t, index in enumerate(indices):
        if recorder.due(t):
            recorder.record(
                t, w, objective.risk(w), float(np.linalg.norm(objective.grad(w)))
            )
        g = grad_fn(w, S.samples[index : index + 1])[0]
        if not np.all(np.isfinite(g)):
            emsg = f"Non-finite stochastic gradient at step {t}."
            raise OptimizationError(emsg, grad_norm=float("nan"))
        w = project(spec.domain, w - sgd_step_size(spec.constants, t) * g)

    grad_norm = float(np.linalg.norm(objective.grad(w)))
    recorder.record(steps, w, objective.risk(w), grad_norm)
    logger.debug("sgd finished %d steps with seed %d", steps, seed)
    return Trace(
        algorithm=Algorithm.SGD,
        step_count=steps,
        terminal=w,
        rng_seed=seed,
        **recorder.arrays(),
    )


def largest_admissible_epsilon(constants: ConstantsBundle) -> float:
    """Return the largest tolerance accepted by saddle-escaping PGD.

    This is ``min{8 beta^3 L2^3 / (27 L1^3), 27 / (64^3 L2^3), beta / 2}``,
    which is zero when ``L2 = 0``.

    Parameters
    ----------
    constants : ConstantsBundle
        The problem constants, with `beta` set.

    Returns
    -------
    float
        The admissible upper limit of ``epsilon``.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    beta = constants.beta
    if beta is None:
        emsg = "Saddle-escaping PGD requires a certified boundary gradient floor beta."
        raise InputError(emsg)

    L1, L2 = constants.L1, constants.L2
    if L2 == 0:
        return 0.0

    return min(
        8 * beta**3 * L2**3 / (27 * L1**3),
        27 / (64**3 * L2**3),
        beta / 2,
    )


@dataclass(frozen=True)
class PgdConfig:
    """Configuration of a saddle-escaping PGD run.

    Parameters
    ----------
    epsilon : float
        The gradient tolerance; the curvature tolerance is its cube root.
    constants : ConstantsBundle
        The problem constants, with `beta` set.
    max_steps : int, optional
        The step cap. Defaults to :data:`~stabilab.common.DEFAULT_STEP_CAP`.
    record_stride : int, default=1
        Record every `record_stride`-th iterate.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    epsilon: float
    constants: ConstantsBundle
    max_steps: int = DEFAULT_STEP_CAP
    record_stride: int = 1

    @property
    def gamma(self) -> float:
        """The curvature tolerance ``epsilon^(1/3)``."""
        return self.epsilon ** (1 / 3)

    @property
    def mix(self) -> float:
        """The curvature step weight ``3 L1 epsilon^(1/3) / (2 beta L2)``."""
        c = self.constants
        assert c.beta is not None
        return 3 * c.L1 * self.gamma / (2 * c.beta * c.L2)

    def validate(self) -> None:
        """Reject a configuration outside the admissible range."""
        limit = largest_admissible_epsilon(self.constants)
        if not 0 < self.epsilon <= limit:
            emsg = (
                f"Require 0 < epsilon <= {limit!r} for the given constants, "
                f"got epsilon={self.epsilon!r}."
            )
            raise InputError(emsg)

        if self.max_steps < 1:
            emsg = f"Require a positive step cap, got {self.max_steps}."
            raise InputError(emsg)

        if self.record_stride < 1:
            emsg = f"Require a positive record stride, got {self.record_stride}."
            raise InputError(emsg)


def _ray_to_sphere(w: ParamVector, v: ParamVector) -> float:
    """Largest ``t`` with ``||w + t v|| <= 1`` for unit `v` and ``||w|| <= 1``."""
    wv = float(w @ v)
    return -wv + math.sqrt(max(wv * wv - float(w @ w) + 1.0, 0.0))


def negative_curvature_step(
    w: ArrayLike,
    H: ArrayLike,
    constants: ConstantsBundle,
    epsilon: float,
) -> ParamVector:
    """Return a unit-ball point along the most negative curvature direction.

    The point is ``u = w + s v`` with ``v`` the unit eigenvector of the
    smallest eigenvalue of `H` and ``s = beta / (2 L1)``, trying the
    orientation of ``v`` with positive first non-zero coordinate before its
    opposite. When ``s`` is too short to reach the required decrease
    ``(u - w)^T H (u - w) <= -beta^2 epsilon^(1/3) / (8 L1)``, which happens
    for ``L1 > 2``, the step is lengthened to the shortest one that does,
    provided it stays in the ball.

    Parameters
    ----------
    w : ArrayLike
        The current iterate in the unit ball.
    H : ArrayLike
        The empirical Hessian at `w`.
    constants : ConstantsBundle
        The problem constants, with `beta` set.
    epsilon : float
        The PGD gradient tolerance.

    Returns
    -------
    ndarray
        The point ``u`` with ``||u|| <= 1``.

    Raises
    ------
    OptimizationError
        If neither orientation reaches the required decrease inside the ball.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    beta = constants.beta
    if beta is None:
        emsg = "Negative curvature steps require a certified beta."
        raise InputError(emsg)

    w = as_param_vector(w)
    value, v = smallest_eigenpair(H)
    gamma = epsilon ** (1 / 3)
    if value > -gamma:
        emsg = (
            f"Require a smallest eigenvalue <= -epsilon^(1/3)={-gamma!r}, "
            f"got {value!r}."
        )
        raise InputError(emsg)

    required = beta**2 * gamma / (8 * constants.L1)
    step = max(
        beta / (2 * constants.L1), math.sqrt(required / -value) * (1 + 1e-12)
    )

    for sign in (1.0, -1.0):
        direction = sign * v
        if step <= _ray_to_sphere(w, direction):
            u = w + step * direction
            if float(u @ u) <= 1.0:
                return u

    emsg = (
        f"No negative curvature step of length {step!r} stays in the unit ball "
        f"from {w.tolist()}, the certified constants are inconsistent."
    )
    raise OptimizationError(emsg)


def run_pgd_sosp(
    spec: ProblemSpec,
    S: Dataset,
    w0: ArrayLike,
    config: PgdConfig,
) -> Trace:
    """Run saddle-escaping projected gradient descent on the unit ball.

    At every step with gradient norm at least ``epsilon`` the iterate is
    shrunk by ``(1 - beta / L1)`` when it lies on the unit sphere, and takes
    a projected gradient step of size ``1 / L1`` otherwise. Below
    ``epsilon``, a smallest Hessian eigenvalue at most ``-epsilon^(1/3)``
    triggers the mix ``sigma u + (1 - sigma) w`` with the point ``u`` of
    :func:`negative_curvature_step`, otherwise the run halts at the current
    iterate.

    Parameters
    ----------
    spec : ProblemSpec
        The problem, whose domain must be the unit ball.
    S : Dataset
        The training set.
    w0 : ArrayLike
        The starting point, inside the unit ball.
    config : PgdConfig
        The admissible configuration.

    Returns
    -------
    Trace
        The recorded run, halted with
        :attr:`~stabilab.common.HaltReason.SOSP_FOUND` or
        :attr:`~stabilab.common.HaltReason.STEP_CAP`.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if not spec.domain.is_unit_ball:
        emsg = f"Saddle-escaping PGD requires the unit ball, got {spec.domain!r}."
        raise InputError(emsg)

    config.validate()
    c = config.constants
    assert c.beta is not None

    objective = _Objective(spec, S)
    recorder = _Recorder(config.record_stride)
    eta, shrink, mix = 1.0 / c.L1, 1.0 - c.beta / c.L1, config.mix
    counts = {"gradient": 0, "boundary": 0, "curvature": 0}
    halt = HaltReason.STEP_CAP
    w = _start(spec, w0)
    t = 0

    while True:
        g = objective.grad(w)
        grad_norm = float(np.linalg.norm(g))
        if recorder.due(t):
            recorder.record(t, w, objective.risk(w), grad_norm)

        if grad_norm < config.epsilon:
            H = objective.hess(w)
            value, _ = smallest_eigenpair(H)
            if value > -config.gamma:
                halt = HaltReason.SOSP_FOUND
                break

        if t >= config.max_steps:
            break

        if grad_norm >= config.epsilon:
            if float(np.linalg.norm(w)) >= 1 - BOUNDARY_TOL:
                w = shrink * w
                counts["boundary"] += 1
            else:
                w = project(spec.domain, w - eta * g)
                counts["gradient"] += 1
        else:
            u = negative_curvature_step(w, H, c, config.epsilon)
            w = project(spec.domain, mix * u + (1 - mix) * w)
            counts["curvature"] += 1
        t += 1

    recorder.record(t, w, objective.risk(w), grad_norm)

    if halt is HaltReason.STEP_CAP:
        wmsg = (
            f"stabilab saddle-escaping PGD reached the step cap {config.max_steps} "
            f"with gradient norm {grad_norm:.3e}."
        )
        warnings.warn(wmsg, stacklevel=2)

    logger.debug("pgd halted (%s) after %d steps: %s", halt, t, counts)
    return Trace(
        algorithm=Algorithm.PGD,
        step_count=t,
        terminal=w,
        halt_reason=halt,
        branches=Branch(**counts),
        **recorder.arrays(),
    )


class SospCheck(NamedTuple):
    """Outcome of an approximate second-order stationarity test."""

    passed: bool
    grad_norm: float
    min_eig: float


def check_sosp(
    spec: ProblemSpec, S: Dataset, w: ArrayLike, eps: float, gamma: float
) -> SospCheck:
    """Test whether `w` is an ``(eps, gamma)`` second-order stationary point.

    Parameters
    ----------
    spec : ProblemSpec
        The problem.
    S : Dataset
        The training set.
    w : ArrayLike
        The point, inside the domain.
    eps : float
        The gradient norm tolerance.
    gamma : float
        The curvature tolerance.

    Returns
    -------
    SospCheck
        Whether ``||grad R_S(w)|| <= eps`` and the smallest eigenvalue of
        ``hess R_S(w)`` is at least ``-gamma``, with both measurements.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    w = as_param_vector(w, dimension=spec.d)
    objective = _Objective(spec, S)
    grad_norm = float(np.linalg.norm(objective.grad(w)))
    min_eig, _ = smallest_eigenpair(objective.hess(w))
    return SospCheck(grad_norm <= eps and min_eig >= -gamma, grad_norm, min_eig)
