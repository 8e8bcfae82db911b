# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Monte-Carlo estimates of stability, generalization and excess risk.

Each replicate draws a training set ``S`` and its neighbour ``S'``, which
differs only at index 0, from seeds derived with
:func:`~stabilab.common.derive_seed`. Both sets are trained with the same
algorithm seed so their randomness is coupled, and the supremum over test
points in the stability definition is approximated by the maximum over a
frozen probe set. The probe maximum under-estimates the supremum.

Notes
-----
.. versionadded:: 0.1.0

"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import asdict, dataclass, field
import logging
import math
from typing import TYPE_CHECKING, Any
import warnings

from joblib import Parallel, delayed
import lazy_loader as lazy

from .bounds import TailKind, subgaussian_tail_bound
from .common import (
    DEFAULT_PROBE_COUNT,
    DEFAULT_REPLICATES,
    Algorithm,
    HaltReason,
    InputError,
    OptimizationError,
    derive_seed,
    make_rng,
    spawn_seeds,
)
from .core import as_param_vector
from .landscape import locate_empirical_min_near
from .optimizers import (
    PgdConfig,
    Trace,
    largest_admissible_epsilon,
    run_gd,
    run_pgd_sosp,
    run_sgd,
)
from .problems import empirical_grad, empirical_hess, empirical_risk

if TYPE_CHECKING:
    from numpy.typing import ArrayLike
    import numpy as np

    from .core import Dataset, ParamVector
    from .problems import ProblemSpec

# lazy import third-party dependencies
np = lazy.load("numpy")
stats = lazy.load("scipy.stats")

__all__ = [
    "BOOTSTRAP_RESAMPLES",
    "SIGMA",
    "ConcentrationReport",
    "ExcessRiskReport",
    "GapEstimate",
    "MinimaDistanceReport",
    "PairedRun",
    "ReplicateResult",
    "ScalingFit",
    "StabilityEstimate",
    "SweepReport",
    "TailCheck",
    "concentration_mc",
    "estimate_excess_risk",
    "estimate_generalization_gap",
    "estimate_stability",
    "fit_scaling",
    "minima_distance_experiment",
    "paired_runs",
    "replicate_results",
    "run_replicate",
    "stability_sweep",
]

logger = logging.getLogger(__name__)

BOOTSTRAP_RESAMPLES: int = 1000
"""The number of bootstrap resamples of a scaling fit."""

SIGMA: float = 3.0
"""Standard errors of margin in every one-sided Monte-Carlo check."""

TAIL_LEVELS: tuple[float, ...] = (0.5, 0.1, 0.01)
"""Tail bound values at which the default deviations are placed."""


def _mean_se(values: ArrayLike) -> tuple[float, float]:
    array = np.asarray(values, dtype=np.float64)
    if array.size == 0:
        return math.nan, math.nan
    se = float(array.std(ddof=1) / math.sqrt(array.size)) if array.size > 1 else 0.0
    return float(array.mean()), se


def _start(spec: ProblemSpec) -> ParamVector:
    return spec.domain.center.copy()


def _train(
    spec: ProblemSpec,
    algorithm: Algorithm,
    S: Dataset,
    t: int,
    seed: int,
    epsilon: float | None,
    record_stride: int,
) -> Trace:
    w0 = _start(spec)
    if t == 0:
        risk = empirical_risk(spec, w0, S)
        grad_norm = float(np.linalg.norm(empirical_grad(spec, w0, S)))
        return Trace(
            algorithm=algorithm,
            iterates=w0[np.newaxis],
            recorded_steps=np.zeros(1, dtype=int),
            empirical_risks=np.array([risk]),
            grad_norms=np.array([grad_norm]),
            step_count=0,
            terminal=w0,
            rng_seed=seed,
        )

    if algorithm is Algorithm.GD:
        return run_gd(spec, S, w0, t, record_stride=record_stride)
    if algorithm is Algorithm.SGD:
        return run_sgd(spec, S, w0, t, seed, record_stride=record_stride)

    if epsilon is None:
        epsilon = largest_admissible_epsilon(spec.constants)
    config = PgdConfig(
        epsilon, spec.constants, max_steps=t, record_stride=record_stride
    )
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="stabilab saddle-escaping PGD")
        return run_pgd_sosp(spec, S, w0, config)


@dataclass(frozen=True)
class PairedRun:
    """Coupled runs of one algorithm on neighbouring training sets.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    S: Dataset
    S_prime: Dataset
    trace: Trace
    trace_prime: Trace
    shared_seed: int


def _neighbours(
    spec: ProblemSpec, n: int, data_seed: int, substitute_seed: int, *, identical: bool
) -> tuple[Dataset, Dataset]:
    if n < 1:
        emsg = f"Require a training set size n >= 1, got {n}."
        raise InputError(emsg)
    S = spec.sample(data_seed, n)
    if identical:
        return S, S
    z_prime = spec.fresh_sample(make_rng(substitute_seed), 1)[0]
    return S, S.substitute(0, z_prime)


def paired_runs(
    spec: ProblemSpec,
    algorithm: str | Algorithm,
    n: int,
    t: int,
    replicates: int,
    base_seed: int = 0,
    *,
    identical: bool = False,
    pgd_epsilon: float | None = None,
    record_stride: int = 1,
) -> Iterator[PairedRun]:
    """Yield one coupled pair of runs per replicate.

    Parameters
    ----------
    spec : ProblemSpec
        The problem.
    algorithm : str or Algorithm
        The algorithm, ``gd``, ``sgd`` or ``pgd``.
    n : int
        The training set size.
    t : int
        The number of steps.
    replicates : int
        The number of pairs.
    base_seed : int, default=0
        The experiment seed.
    identical : bool, default=False
        Train both members on the same set.
    pgd_epsilon : float, optional
        PGD tolerance. Defaults to the largest admissible value.
    record_stride : int, default=1
        Trace recording stride.

    Yields
    ------
    PairedRun
        The coupled runs of each replicate.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    algorithm = Algorithm(algorithm)
    for replicate in range(replicates):
        data, substitute, _, algo = spawn_seeds(derive_seed(base_seed, replicate, n, t))
        S, S_prime = _neighbours(spec, n, data, substitute, identical=identical)
        trace, trace_prime = (
            _train(spec, algorithm, sample, t, algo, pgd_epsilon, record_stride)
            for sample in (S, S_prime)
        )
        yield PairedRun(S, S_prime, trace, trace_prime, shared_seed=algo)


def _empirical_minimum(spec: ProblemSpec, S: Dataset) -> ParamVector | None:
    if spec.empirical_minimizer is not None:
        return spec.empirical_minimizer(S)
    try:
        located = [
            locate_empirical_min_near(spec, S, k).point
            for k in range(spec.population_oracle.K)
        ]
    except OptimizationError as err:
        logger.debug("empirical minimum not located: %s", err)
        return None
    return min(located, key=lambda w: empirical_risk(spec, w, S))


@dataclass(frozen=True)
class ReplicateResult:
    """Measurements of one replicate at one ``(n, t)`` grid cell.

    Risks are averaged over the algorithm seeds of the replicate, and
    `stability_pair_diff` is the probe maximum of the averaged loss change.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    problem: str
    n: int
    t: int
    replicate: int
    seed: int
    emp_risk: float
    pop_risk: float
    gap: float
    stability_pair_diff: float
    halt_reason: str
    opt_gap: float = math.nan
    excess: float = math.nan

    def to_row(self) -> dict[str, Any]:
        """Return the result as a CSV row."""
        return asdict(self)


def run_replicate(
    spec: ProblemSpec,
    algorithm: str | Algorithm,
    n: int,
    t: int,
    replicate: int,
    base_seed: int = 0,
    *,
    probe_count: int = DEFAULT_PROBE_COUNT,
    algo_seeds_per_replicate: int = 1,
    identical: bool = False,
    pgd_epsilon: float | None = None,
    record_stride: int = 1,
    excess: bool = False,
) -> ReplicateResult:
    """Train on one neighbouring pair of training sets and measure it.

    Parameters
    ----------
    spec : ProblemSpec
        The problem.
    algorithm : str or Algorithm
        The algorithm, ``gd``, ``sgd`` or ``pgd``.
    n : int
        The training set size.
    t : int
        The number of steps, possibly zero.
    replicate : int
        The replicate index.
    base_seed : int, default=0
        The experiment seed.
    probe_count : int, default=512
        The number of fresh test points approximating the supremum.
    algo_seeds_per_replicate : int, default=1
        The number of coupled algorithm seeds averaged over.
    identical : bool, default=False
        Train both members on the same set.
    pgd_epsilon : float, optional
        PGD tolerance. Defaults to the largest admissible value.
    record_stride : int, default=1
        Trace recording stride.
    excess : bool, default=False
        Also locate the empirical minimum and measure the optimization gap
        and excess risk.

    Returns
    -------
    ReplicateResult
        The measurements.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    algorithm = Algorithm(algorithm)
    seed = derive_seed(base_seed, replicate, n, t)
    data, substitute, probes, algo = spawn_seeds(seed)
    S, S_prime = _neighbours(spec, n, data, substitute, identical=identical)
    Z = spec.fresh_sample(make_rng(probes), probe_count)
    population = spec.population_oracle
    loss = spec.sample_oracle.loss_fn

    terminals, diffs, halts = [], [], set()
    for algo_seed in spawn_seeds(algo, algo_seeds_per_replicate):
        trace, trace_prime = (
            _train(spec, algorithm, sample, t, algo_seed, pgd_epsilon, record_stride)
            for sample in (S, S_prime)
        )
        terminals.append(trace.terminal)
        diffs.append(loss(trace.terminal, Z) - loss(trace_prime.terminal, Z))
        halts |= {trace.halt_reason, trace_prime.halt_reason}

    emp_risk = math.fsum(empirical_risk(spec, w, S) for w in terminals) / len(terminals)
    pop_risk = math.fsum(population.risk(w) for w in terminals) / len(terminals)
    halt_reason = HaltReason.STEP_CAP if HaltReason.STEP_CAP in halts else min(halts)

    opt_gap = excess_risk = math.nan
    if excess:
        minimum = _empirical_minimum(spec, S)
        if minimum is not None:
            opt_gap = emp_risk - empirical_risk(spec, minimum, S)
        excess_risk = pop_risk - population.risk(population.global_minimum)

    return ReplicateResult(
        problem=spec.name,
        n=n,
        t=t,
        replicate=replicate,
        seed=seed,
        emp_risk=emp_risk,
        pop_risk=pop_risk,
        gap=pop_risk - emp_risk,
        stability_pair_diff=float(np.max(np.abs(np.mean(diffs, axis=0)))),
        halt_reason=str(halt_reason),
        opt_gap=opt_gap,
        excess=excess_risk,
    )


def replicate_results(
    spec: ProblemSpec,
    algorithm: str | Algorithm,
    n: int,
    t: int,
    replicates: int = DEFAULT_REPLICATES,
    base_seed: int = 0,
    *,
    n_jobs: int = 1,
    **kwargs: Any,
) -> list[ReplicateResult]:
    """Run the replicates of one grid cell in a :mod:`joblib` work pool.

    The keyword arguments are those of :func:`run_replicate`. Results are
    ordered by replicate index whatever the pool size.
    """
    if replicates < 1:
        emsg = f"Require at least one replicate, got {replicates}."
        raise InputError(emsg)
    jobs = (
        delayed(run_replicate)(spec, algorithm, n, t, replicate, base_seed, **kwargs)
        for replicate in range(replicates)
    )
    return list(Parallel(n_jobs=n_jobs)(jobs))


@dataclass(frozen=True)
class StabilityEstimate:
    """Monte-Carlo estimate of the uniform stability after ``t`` steps.

    The estimate is a lower estimate of the true stability, as the supremum
    over test points is approximated by a maximum over `probe_count` probes.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    t: int
    value: float
    replicates: int
    probe_count: int
    std_error: float
    n: int = 0
    values: tuple[float, ...] = field(default=(), repr=False)

    def to_row(self) -> dict[str, Any]:
        """Return the estimate as a CSV row."""
        return {
            "n": self.n,
            "t": self.t,
            "stability": self.value,
            "stability_std_error": self.std_error,
            "replicates": self.replicates,
            "probe_count": self.probe_count,
        }


def _stability(
    results: Sequence[ReplicateResult], probe_count: int
) -> StabilityEstimate:
    values = tuple(result.stability_pair_diff for result in results)
    value, std_error = _mean_se(values)
    return StabilityEstimate(
        t=results[0].t,
        value=value,
        replicates=len(values),
        probe_count=probe_count,
        std_error=std_error,
        n=results[0].n,
        values=values,
    )


def estimate_stability(
    spec: ProblemSpec,
    algorithm: str | Algorithm,
    n: int,
    t: int,
    replicates: int = DEFAULT_REPLICATES,
    algo_seeds_per_replicate: int = 1,
    probe_count: int = DEFAULT_PROBE_COUNT,
    base_seed: int = 0,
    *,
    identical: bool = False,
    pgd_epsilon: float | None = None,
    n_jobs: int = 1,
) -> StabilityEstimate:
    """Estimate ``sup_z |E_A[f(w_t, z) - f(w'_t, z)]|`` by Monte-Carlo.

    For each replicate the loss change on every probe is averaged over the
    coupled algorithm seeds, the maximum over probes is taken, and the
    replicate values are averaged.

    Parameters
    ----------
    spec : ProblemSpec
        The problem.
    algorithm : str or Algorithm
        The algorithm, ``gd``, ``sgd`` or ``pgd``.
    n : int
        The training set size.
    t : int
        The number of steps.
    replicates : int, default=50
        The number of neighbouring pairs, at least 30 for reported estimates.
    algo_seeds_per_replicate : int, default=1
        The number of coupled algorithm seeds per pair.
    probe_count : int, default=512
        The number of probes, at least 100 for reported estimates.
    base_seed : int, default=0
        The experiment seed.
    identical : bool, default=False
        Train both members on the same set, for which the estimate is zero.
    pgd_epsilon : float, optional
        PGD tolerance. Defaults to the largest admissible value.
    n_jobs : int, default=1
        The :mod:`joblib` work pool size.

    Returns
    -------
    StabilityEstimate
        The mean over replicates with its standard error.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    results = replicate_results(
        spec,
        algorithm,
        n,
        t,
        replicates,
        base_seed,
        n_jobs=n_jobs,
        probe_count=probe_count,
        algo_seeds_per_replicate=algo_seeds_per_replicate,
        identical=identical,
        pgd_epsilon=pgd_epsilon,
    )
    estimate = _stability(results, probe_count)
    logger.debug("stability n=%d t=%d: %r", n, t, estimate)
    return estimate


@dataclass(frozen=True)
class GapEstimate:
    """Monte-Carlo estimate of ``E[R(w_t) - R_S(w_t)]``."""

    n: int
    t: int
    value: float
    std_error: float
    replicates: int

    def to_row(self) -> dict[str, Any]:
        """Return the estimate as a CSV row."""
        return {
            "n": self.n,
            "t": self.t,
            "gap": self.value,
            "gap_std_error": self.std_error,
            "replicates": self.replicates,
        }


def estimate_generalization_gap(
    spec: ProblemSpec,
    algorithm: str | Algorithm,
    n: int,
    t: int,
    replicates: int = DEFAULT_REPLICATES,
    base_seed: int = 0,
    *,
    algo_seeds_per_replicate: int = 1,
    pgd_epsilon: float | None = None,
    n_jobs: int = 1,
) -> GapEstimate:
    """Estimate the expected generalization gap after `t` steps.

    The population risk comes from the population oracle of `spec`, analytic
    or frozen Monte-Carlo.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    results = replicate_results(
        spec,
        algorithm,
        n,
        t,
        replicates,
        base_seed,
        n_jobs=n_jobs,
        probe_count=1,
        algo_seeds_per_replicate=algo_seeds_per_replicate,
        pgd_epsilon=pgd_epsilon,
    )
    value, std_error = _mean_se([result.gap for result in results])
    return GapEstimate(n, t, value, std_error, len(results))


@dataclass(frozen=True)
class ExcessRiskReport:
    """Excess risk with its optimization and generalization decomposition.

    The decomposition check is ``excess <= opt + |gen| + 3 (se_excess +
    se_opt + se_gen)``. It is skipped, with `checked` false, when an
    empirical minimum could not be located in some replicate.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    n: int
    t: int
    excess: float
    excess_std_error: float
    opt: float
    opt_std_error: float
    gen: float
    gen_std_error: float
    replicates: int
    checked: bool
    holds: bool
    located: int

    def to_row(self) -> dict[str, Any]:
        """Return the report as a CSV row."""
        return asdict(self)


def _excess_report(results: Sequence[ReplicateResult]) -> ExcessRiskReport:
    excess, excess_se = _mean_se([result.excess for result in results])
    gen, gen_se = _mean_se([result.gap for result in results])
    gaps = [result.opt_gap for result in results if not math.isnan(result.opt_gap)]
    opt, opt_se = _mean_se(gaps)
    checked = len(gaps) == len(results)
    holds = checked and excess <= opt + abs(gen) + SIGMA * (excess_se + opt_se + gen_se)
    return ExcessRiskReport(
        n=results[0].n,
        t=results[0].t,
        excess=excess,
        excess_std_error=excess_se,
        opt=opt,
        opt_std_error=opt_se,
        gen=gen,
        gen_std_error=gen_se,
        replicates=len(results),
        checked=checked,
        holds=holds,
        located=len(gaps),
    )


def estimate_excess_risk(
    spec: ProblemSpec,
    algorithm: str | Algorithm,
    n: int,
    t: int,
    replicates: int = DEFAULT_REPLICATES,
    base_seed: int = 0,
    *,
    algo_seeds_per_replicate: int = 1,
    pgd_epsilon: float | None = None,
    n_jobs: int = 1,
) -> ExcessRiskReport:
    """Estimate the excess risk and its decomposition after `t` steps.

    The empirical minimum is the closed form minimizer of `spec` when it has
    one, otherwise the best of the empirical minima located near each
    population minimum.

    Parameters
    ----------
    spec : ProblemSpec
        The problem, with a known population global minimum.
    algorithm : str or Algorithm
        The algorithm, ``gd``, ``sgd`` or ``pgd``.
    n : int
        The training set size.
    t : int
        The number of steps.
    replicates : int, default=50
        The number of replicates.
    base_seed : int, default=0
        The experiment seed.
    algo_seeds_per_replicate : int, default=1
        The number of algorithm seeds per replicate.
    pgd_epsilon : float, optional
        PGD tolerance. Defaults to the largest admissible value.
    n_jobs : int, default=1
        The :mod:`joblib` work pool size.

    Returns
    -------
    ExcessRiskReport
        Means and standard errors of the excess risk, optimization error
        and generalization gap, with the decomposition check.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    results = replicate_results(
        spec,
        algorithm,
        n,
        t,
        replicates,
        base_seed,
        n_jobs=n_jobs,
        probe_count=1,
        algo_seeds_per_replicate=algo_seeds_per_replicate,
        pgd_epsilon=pgd_epsilon,
        excess=True,
    )
    return _excess_report(results)


@dataclass(frozen=True)
class MinimaDistanceReport:
    """Distances between the empirical minima of neighbouring training sets.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    n: int
    replicates: int
    bound: float
    distances: np.ndarray = field(repr=False)
    events: np.ndarray = field(repr=False)

    @property
    def event_frequency(self) -> float:
        """Fraction of replicates on which the good event held."""
        return float(self.events.mean())

    @property
    def max_ratio(self) -> float:
        """Largest distance to bound ratio over the good event."""
        on_event = self.distances[self.events]
        return float(on_event.max() / self.bound) if on_event.size else 0.0

    @property
    def violations(self) -> int:
        """Replicates on the good event whose distance exceeds the bound."""
        return int(np.count_nonzero(self.distances[self.events] > self.bound))


def _good_event(spec: ProblemSpec, S: Dataset, w_star: ParamVector) -> bool:
    c = spec.constants
    population = spec.population_oracle
    if c.L2 > 0:
        grad = empirical_grad(spec, w_star, S)
        if np.linalg.norm(grad) > c.lam**2 / (16 * c.L2):
            return False
    deviation = empirical_hess(spec, w_star, S) - population.hess(w_star)
    return bool(np.linalg.norm(deviation, 2) <= c.lam / 4)


def minima_distance_experiment(
    spec: ProblemSpec, n: int, replicates: int = 500, base_seed: int = 0
) -> MinimaDistanceReport:
    """Compare ``||w*_S - w*_S'||`` with ``8 L0 / (n lam)`` over replicates.

    The good event requires ``||grad R_S(w*)|| <= lam^2 / (16 L2)``, vacuous
    when ``L2 = 0``, and a spectral Hessian deviation of at most ``lam / 4``
    at the population global minimum, for both training sets.

    Parameters
    ----------
    spec : ProblemSpec
        A convex problem with locatable empirical minima.
    n : int
        The training set size.
    replicates : int, default=500
        The number of neighbouring pairs.
    base_seed : int, default=0
        The experiment seed.

    Returns
    -------
    MinimaDistanceReport
        Per-replicate distances and good event indicators.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if not spec.is_convex:
        emsg = f"Require a convex problem, got {spec.name!r}."
        raise InputError(emsg)

    w_star = spec.population_oracle.global_minimum
    distances, events = [], []
    for replicate in range(replicates):
        data, substitute, _, _ = spawn_seeds(derive_seed(base_seed, replicate, n))
        S, S_prime = _neighbours(spec, n, data, substitute, identical=False)
        minimum = _empirical_minimum(spec, S)
        minimum_prime = _empirical_minimum(spec, S_prime)
        if minimum is None or minimum_prime is None:
            emsg = f"Empirical minimum of replicate {replicate} could not be located."
            raise OptimizationError(emsg)
        distances.append(float(np.linalg.norm(minimum - minimum_prime)))
        events.append(
            _good_event(spec, S, w_star) and _good_event(spec, S_prime, w_star)
        )

    c = spec.constants
    return MinimaDistanceReport(
        n=n,
        replicates=replicates,
        bound=8 * c.L0 / (n * c.lam),
        distances=np.asarray(distances),
        events=np.asarray(events, dtype=bool),
    )


@dataclass(frozen=True)
class TailCheck:
    """Empirical tail frequency against a sub-Gaussian tail bound."""

    which: str
    delta: float
    frequency: float
    bound: float
    std_error: float

    @property
    def holds(self) -> bool:
        """Whether the frequency is within three standard errors of the bound."""
        return self.frequency <= self.bound + SIGMA * self.std_error


@dataclass(frozen=True)
class ConcentrationReport:
    """Second moments of the empirical gradient and Hessian deviations.

    The Hessian moment bound is not defined in dimension one, where it is
    reported as ``nan`` and not checked.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    n: int
    replicates: int
    grad_moment: float
    grad_moment_std_error: float
    grad_bound: float
    hess_moment: float
    hess_moment_std_error: float
    hess_bound: float
    tails: tuple[TailCheck, ...]

    @property
    def grad_ok(self) -> bool:
        """Whether the gradient moment is below its bound within 3 sigma."""
        return self.grad_moment - SIGMA * self.grad_moment_std_error <= self.grad_bound

    @property
    def hess_ok(self) -> bool:
        """Whether the Hessian moment is below its bound within 3 sigma."""
        if math.isnan(self.hess_bound):
            return True
        return self.hess_moment - SIGMA * self.hess_moment_std_error <= self.hess_bound

    @property
    def passed(self) -> bool:
        """Whether both moments and every tail check hold."""
        return self.grad_ok and self.hess_ok and all(tail.holds for tail in self.tails)


def _default_deltas(spec: ProblemSpec, n: int) -> dict[TailKind, tuple[float, ...]]:
    c, d = spec.constants, spec.d
    return {
        TailKind.GRADIENT_INNER: tuple(
            c.L0**2 * math.sqrt(16 * math.log(2 / level) / n) for level in TAIL_LEVELS
        ),
        TailKind.HESSIAN: tuple(
            c.L1 * math.sqrt(16 * math.log(2 * d / level) / n) for level in TAIL_LEVELS
        ),
    }


def concentration_mc(
    spec: ProblemSpec,
    w_ref: ArrayLike,
    n: int,
    replicates: int = 10_000,
    base_seed: int = 0,
    *,
    deltas: dict[str, Sequence[float]] | None = None,
) -> ConcentrationReport:
    """Measure the concentration of the empirical gradient and Hessian at `w_ref`.

    Estimates ``E||grad R_S - grad R||^2`` against ``L0^2 / n`` and
    ``E||hess R_S - hess R||_2^2`` against
    ``(10 sqrt(log d) L1 + 8 e log d L1 / sqrt(n))^2 / n``, and the tail
    frequencies of the gradient inner product and Hessian deviations
    against their sub-Gaussian bounds.

    Parameters
    ----------
    spec : ProblemSpec
        The problem.
    w_ref : ArrayLike
        The reference point, typically a population minimum.
    n : int
        The training set size.
    replicates : int, default=10000
        The number of training sets.
    base_seed : int, default=0
        The experiment seed.
    deltas : dict, optional
        Deviations keyed by ``gradient_inner`` and ``hessian``. Each defaults
        to the three deviations at which the bound equals 0.5, 0.1 and 0.01.

    Returns
    -------
    ConcentrationReport
        The moments, their bounds and the tail checks.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    c, d = spec.constants, spec.d
    w = as_param_vector(w_ref, dimension=d)
    population = spec.population_oracle
    pop_grad, pop_hess = population.grad(w), population.hess(w)
    pop_inner = float(pop_grad @ pop_grad)
    oracle = spec.sample_oracle

    grad_sq, hess_sq, inner_dev, hess_dev = [], [], [], []
    for replicate in range(replicates):
        (data,) = spawn_seeds(derive_seed(base_seed, replicate, n), 1)
        samples = spec.sample(data, n).samples
        grads = oracle.grad_fn(w, samples)
        grad_sq.append(float(np.sum((grads.mean(axis=0) - pop_grad) ** 2)))
        inner_dev.append(abs(float(np.mean(grads @ pop_grad)) - pop_inner))
        deviation = oracle.hess_fn(w, samples).mean(axis=0) - pop_hess
        spectral = float(np.linalg.norm(deviation, 2))
        hess_sq.append(spectral**2)
        hess_dev.append(spectral)

    chosen = _default_deltas(spec, n)
    if deltas is not None:
        chosen |= {TailKind(key): tuple(value) for key, value in deltas.items()}

    tails = []
    observations = {TailKind.GRADIENT_INNER: inner_dev, TailKind.HESSIAN: hess_dev}
    for which, deviations in observations.items():
        observed = np.asarray(deviations)
        for delta in chosen[which]:
            frequency = float(np.mean(observed > delta))
            tails.append(
                TailCheck(
                    which=str(which),
                    delta=delta,
                    frequency=frequency,
                    bound=subgaussian_tail_bound(c, n, d, delta, which),
                    std_error=math.sqrt(frequency * (1 - frequency) / replicates),
                )
            )

    if d >= 2:
        log_d = math.log(d)
        hess_bound = (
            10 * math.sqrt(log_d) * c.L1 + 8 * math.e * log_d * c.L1 / math.sqrt(n)
        ) ** 2 / n
    else:
        hess_bound = math.nan

    grad_moment, grad_se = _mean_se(grad_sq)
    hess_moment, hess_se = _mean_se(hess_sq)
    return ConcentrationReport(
        n=n,
        replicates=replicates,
        grad_moment=grad_moment,
        grad_moment_std_error=grad_se,
        grad_bound=c.L0**2 / n,
        hess_moment=hess_moment,
        hess_moment_std_error=hess_se,
        hess_bound=hess_bound,
        tails=tuple(tails),
    )


@dataclass(frozen=True)
class ScalingFit:
    """Log-log least-squares slope with a bootstrap interval."""

    slope: float
    intercept: float
    low: float
    high: float
    points: int


def _regress(xs: np.ndarray, ys: np.ndarray) -> tuple[float, float]:
    result = stats.linregress(np.log(xs), np.log(ys))
    return float(result.slope), float(result.intercept)


def fit_scaling(
    xs: Sequence[float],
    ys: Sequence[float],
    *,
    replicate_values: Sequence[Sequence[float]] | None = None,
    resamples: int = BOOTSTRAP_RESAMPLES,
    confidence: float = 0.95,
    seed: int = 0,
) -> ScalingFit:
    """Fit the slope of ``log y`` against ``log x``.

    The interval is a percentile bootstrap, resampling replicates within
    each ``x`` when `replicate_values` are given and the ``(x, y)`` pairs
    otherwise.

    Parameters
    ----------
    xs : sequence of float
        The positive abscissae, typically training set sizes.
    ys : sequence of float
        The means at each abscissa.
    replicate_values : sequence of sequence of float, optional
        The replicate values behind each mean.
    resamples : int, default=1000
        The number of bootstrap resamples.
    confidence : float, default=0.95
        The interval coverage.
    seed : int, default=0
        Seed of the bootstrap.

    Returns
    -------
    ScalingFit
        The slope, intercept and bootstrap interval of the slope.

    Warns
    -----
    UserWarning
        If non-positive means were excluded.

    Notes
    -----
    .. versionadded:: 0.1.0

    Examples
    --------
    >>> fit = fit_scaling([50, 100, 200, 400], [2.0, 1.0, 0.5, 0.25])
    >>> round(fit.slope, 9)
    -1.0

    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape:
        emsg = f"Require matching abscissae and means, got {x.size} and {y.size}."
        raise InputError(emsg)

    keep = (y > 0) & (x > 0)
    if not np.all(keep):
        wmsg = (
            f"stabilab excluded {np.count_nonzero(~keep)} non-positive point(s) "
            "from the log-log fit."
        )
        warnings.warn(wmsg, stacklevel=2)

    if np.count_nonzero(keep) < 3:
        emsg = f"Require at least 3 positive points, got {np.count_nonzero(keep)}."
        raise InputError(emsg)

    slope, intercept = _regress(x[keep], y[keep])
    rng = make_rng(seed)
    slopes = []
    if replicate_values is not None:
        groups = [np.asarray(values, dtype=np.float64) for values in replicate_values]
        kept = [group for group, flag in zip(groups, keep, strict=True) if flag]
        for _ in range(resamples):
            means = np.array(
                [
                    group[rng.integers(0, group.size, group.size)].mean()
                    for group in kept
                ]
            )
            if np.all(means > 0):
                slopes.append(_regress(x[keep], means)[0])
    else:
        xk, yk = x[keep], y[keep]
        for _ in range(resamples):
            pick = rng.integers(0, xk.size, xk.size)
            if np.unique(xk[pick]).size > 1:
                slopes.append(_regress(xk[pick], yk[pick])[0])

    if slopes:
        tail = 50 * (1 - confidence)
        low, high = (float(v) for v in np.percentile(slopes, [tail, 100 - tail]))
    else:
        low = high = slope
    points = int(np.count_nonzero(keep))
    return ScalingFit(slope, intercept, min(low, slope), max(high, slope), points)


@dataclass(frozen=True)
class SweepReport:
    """Stability and generalization gap over a sweep of training set sizes."""

    stability: tuple[StabilityEstimate, ...]
    gaps: tuple[GapEstimate, ...]
    fit: ScalingFit

    @property
    def gap_within_stability(self) -> bool:
        """Whether every ``|gap|`` is below the stability within 3 sigma."""
        return all(
            abs(gap.value)
            <= estimate.value + SIGMA * math.hypot(gap.std_error, estimate.std_error)
            for gap, estimate in zip(self.gaps, self.stability, strict=True)
        )


def stability_sweep(
    spec: ProblemSpec,
    algorithm: str | Algorithm,
    n_values: Sequence[int],
    t: int,
    replicates: int = DEFAULT_REPLICATES,
    base_seed: int = 0,
    *,
    probe_count: int = DEFAULT_PROBE_COUNT,
    algo_seeds_per_replicate: int = 1,
    n_jobs: int = 1,
) -> SweepReport:
    """Estimate stability and generalization gap for each training set size.

    The stability estimates are fitted with :func:`fit_scaling`, using the
    replicate values for the bootstrap.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    stability, gaps = [], []
    for n in n_values:
        results = replicate_results(
            spec,
            algorithm,
            n,
            t,
            replicates,
            base_seed,
            n_jobs=n_jobs,
            probe_count=probe_count,
            algo_seeds_per_replicate=algo_seeds_per_replicate,
        )
        stability.append(_stability(results, probe_count))
        value, std_error = _mean_se([result.gap for result in results])
        gaps.append(GapEstimate(n, t, value, std_error, len(results)))

    fit = fit_scaling(
        list(n_values),
        [estimate.value for estimate in stability],
        replicate_values=[estimate.values for estimate in stability],
        seed=base_seed,
    )
    return SweepReport(tuple(stability), tuple(gaps), fit)
