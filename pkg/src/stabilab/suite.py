# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Experiment configuration and the replicated experiment suite.

An experiment is described by a TOML file, for example:

.. code-block:: toml

    algorithm = "gd"
    n_values = [50, 100, 200]
    t_values = [100, 1000]
    replicates = 50

    [problem]
    name = "quadratic_mean"

    [problem.params]
    d = 4

The suite runs every ``(n, t)`` cell of the grid, writes the per-replicate,
aggregate and bound tables as CSV with a JSON summary, and checks the
measured quantities against the matching bounds.

Notes
-----
.. versionadded:: 0.1.0

"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from datetime import UTC, datetime
import json
import logging
import math
from pathlib import Path
import tomllib
from typing import TYPE_CHECKING, Any

import lazy_loader as lazy

from .bounds import (
    BoundReport,
    convex_excess_bound,
    convex_stability_bound,
    gd_opt_bound,
    good_event_prob_bound,
    local_minima_gen_bound,
    pgd_corollary_excess_bound,
    sgd_opt_bound,
)
from .common import (
    DEFAULT_PROBE_COUNT,
    DEFAULT_REPLICATES,
    PRNG_ALGORITHM,
    SEED_DERIVATION,
    Algorithm,
    ConfigError,
    InputError,
)
from .config import resolve_output_dir
from .optimizers import PgdConfig, largest_admissible_epsilon
from .problems import PROBLEM_BUILDERS, build_problem
from .report import Report
from .stability import SIGMA, ReplicateResult, replicate_results

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    import pandas as pd

    from .problems import ProblemSpec

# lazy import third-party dependencies
pd = lazy.load("pandas")

__all__ = [
    "EXIT_ASSERTION",
    "EXIT_OK",
    "EXIT_USAGE",
    "METRICS",
    "SCHEMA_VERSION",
    "Assertion",
    "ExperimentConfig",
    "SuiteOutcome",
    "config_from_mapping",
    "parse_config",
    "run_suite",
    "write_table",
]

logger = logging.getLogger(__name__)

EXIT_OK: int = 0
"""Exit code of a suite whose assertions all passed."""

EXIT_USAGE: int = 1
"""Exit code of a usage or configuration error."""

EXIT_ASSERTION: int = 2
"""Exit code of a suite with a failed assertion."""

METRICS: tuple[str, ...] = (
    "emp_risk",
    "pop_risk",
    "gap",
    "stability_pair_diff",
    "opt_gap",
    "excess",
)
"""Per-replicate measurements aggregated over each grid cell."""

SCHEMA_VERSION: int = 1
"""Version of the CSV table schemas."""

GENERATED_PREFIX: str = "# generated: "
"""Prefix of the only non-deterministic line of every table."""

_COUNTS: tuple[str, ...] = (
    "replicates",
    "algo_seeds_per_replicate",
    "probe_count",
    "record_stride",
    "n_jobs",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment configuration.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    problem: str
    algorithm: Algorithm
    n_values: tuple[int, ...]
    t_values: tuple[int, ...]
    problem_params: dict[str, Any] = field(default_factory=dict)
    replicates: int = DEFAULT_REPLICATES
    algo_seeds_per_replicate: int = 1
    probe_count: int = DEFAULT_PROBE_COUNT
    base_seed: int = 0
    output_dir: Path | None = None
    record_stride: int = 1
    n_jobs: int = 1
    pgd_epsilon: float | None = None

    def to_dict(self) -> dict[str, Any]:
        """Return the configuration as plain data."""
        result = asdict(self)
        result["algorithm"] = str(self.algorithm)
        result["output_dir"] = None if self.output_dir is None else str(self.output_dir)
        return result


def _integer(value: Any, key: str, *, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        emsg = f"Config key {key!r} expects an integer, got {value!r}."
        raise ConfigError(emsg)
    if value < minimum:
        emsg = f"Config key {key!r} expects an integer >= {minimum}, got {value}."
        raise ConfigError(emsg)
    return value


def _ascending(value: Any, key: str, *, minimum: int) -> tuple[int, ...]:
    if not isinstance(value, list) or not value:
        emsg = (
            f"Config key {key!r} expects a non-empty array of integers, "
            f"got {value!r}."
        )
        raise ConfigError(emsg)
    result = tuple(
        _integer(item, f"{key}[{index}]", minimum=minimum)
        for index, item in enumerate(value)
    )
    if any(a >= b for a, b in zip(result, result[1:], strict=False)):
        emsg = (
            f"Config key {key!r} expects strictly ascending values, "
            f"got {list(result)}."
        )
        raise ConfigError(emsg)
    return result


def config_from_mapping(data: Mapping[str, Any]) -> ExperimentConfig:
    """Validate a parsed configuration mapping.

    Parameters
    ----------
    data : Mapping
        The parsed configuration.

    Returns
    -------
    ExperimentConfig
        The validated configuration with defaults filled.

    Raises
    ------
    ConfigError
        Naming the offending key and the expected type.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    known = {
        "problem",
        "algorithm",
        "n_values",
        "t_values",
        "base_seed",
        "output_dir",
        "pgd_epsilon",
        *_COUNTS,
    }
    for key in data:
        if key not in known:
            emsg = f"Unknown config key {key!r}."
            raise ConfigError(emsg)

    for key in ("problem", "algorithm", "n_values", "t_values"):
        if key not in data:
            emsg = f"Missing required config key {key!r}."
            raise ConfigError(emsg)

    problem = data["problem"]
    if not isinstance(problem, dict):
        emsg = f"Config key 'problem' expects a table, got {problem!r}."
        raise ConfigError(emsg)
    for key in problem:
        if key not in ("name", "params"):
            emsg = f"Unknown config key 'problem.{key}'."
            raise ConfigError(emsg)
    name = problem.get("name")
    if name not in PROBLEM_BUILDERS:
        options = ", ".join(f"{key!r}" for key in PROBLEM_BUILDERS)
        emsg = f"Config key 'problem.name' expects one of {options}, got {name!r}."
        raise ConfigError(emsg)
    params = problem.get("params", {})
    if not isinstance(params, dict):
        emsg = f"Config key 'problem.params' expects a table, got {params!r}."
        raise ConfigError(emsg)

    algorithm = data["algorithm"]
    if not isinstance(algorithm, str) or not Algorithm.valid(algorithm):
        options = " or ".join(f"{item!r}" for item in Algorithm.values())
        emsg = f"Config key 'algorithm' expects {options}, got {algorithm!r}."
        raise ConfigError(emsg)

    counts = {
        key: _integer(data[key], key, minimum=1) for key in _COUNTS if key in data
    }

    epsilon = data.get("pgd_epsilon")
    if epsilon is not None:
        if Algorithm(algorithm) is not Algorithm.PGD:
            emsg = "Config key 'pgd_epsilon' is only valid with algorithm 'pgd'."
            raise ConfigError(emsg)
        numeric = isinstance(epsilon, int | float) and not isinstance(epsilon, bool)
        if not numeric or epsilon <= 0:
            emsg = (
                f"Config key 'pgd_epsilon' expects a positive float, got {epsilon!r}."
            )
            raise ConfigError(emsg)
        epsilon = float(epsilon)

    output_dir = data.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        emsg = f"Config key 'output_dir' expects a string, got {output_dir!r}."
        raise ConfigError(emsg)

    return ExperimentConfig(
        problem=name,
        algorithm=Algorithm(algorithm),
        n_values=_ascending(data["n_values"], "n_values", minimum=1),
        t_values=_ascending(data["t_values"], "t_values", minimum=1),
        problem_params=dict(params),
        base_seed=_integer(data.get("base_seed", 0), "base_seed", minimum=0),
        output_dir=None if output_dir is None else Path(output_dir),
        pgd_epsilon=epsilon,
        **counts,
    )


def parse_config(path: str | Path) -> ExperimentConfig:
    """Read and validate a TOML experiment configuration.

    Parameters
    ----------
    path : str or Path
        The configuration file.

    Returns
    -------
    ExperimentConfig
        The validated configuration with defaults filled.

    Raises
    ------
    ConfigError
        If the file is missing, is not valid TOML, or violates the schema.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as err:
        emsg = f"Config file {str(path)!r} does not exist."
        raise ConfigError(emsg) from err
    except tomllib.TOMLDecodeError as err:
        emsg = f"Config file {str(path)!r} is not valid TOML: {err}."
        raise ConfigError(emsg) from err

    return config_from_mapping(data)


@dataclass(frozen=True)
class Assertion:
    """A measured quantity checked against its bound."""

    name: str
    n: int
    t: int
    measured: float
    bound: float
    passed: bool


@dataclass(frozen=True)
class SuiteOutcome:
    """The exit code and artifacts of a suite run."""

    exit_code: int
    output_dir: Path
    assertions: tuple[Assertion, ...]

    @property
    def failures(self) -> tuple[Assertion, ...]:
        """The failed assertions."""
        return tuple(item for item in self.assertions if not item.passed)


def write_table(frame: pd.DataFrame, path: Path, table: str) -> None:
    """Write a CSV table behind a timestamp line and a schema line.

    Parameters
    ----------
    frame : DataFrame
        The table.
    path : Path
        The destination file.
    table : str
        The table name recorded in the schema line.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    stamp = datetime.now(UTC).isoformat(timespec="seconds")
    columns = ",".join(str(column) for column in frame.columns)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"{GENERATED_PREFIX}{stamp}\n")
        fh.write(f"# schema: stabilab.{table} v{SCHEMA_VERSION} [{columns}]\n")
        frame.to_csv(fh, index=False, lineterminator="\n")


def _epsilon(config: ExperimentConfig, spec: ProblemSpec) -> float | None:
    if config.algorithm is not Algorithm.PGD:
        return None
    if not spec.domain.is_unit_ball:
        emsg = (
            f"Algorithm 'pgd' requires a unit ball domain, {spec.name!r} has "
            f"{spec.domain!r}."
        )
        raise ConfigError(emsg)
    try:
        epsilon = config.pgd_epsilon
        if epsilon is None:
            epsilon = largest_admissible_epsilon(spec.constants)
        PgdConfig(epsilon, spec.constants).validate()
    except InputError as err:
        emsg = f"Config key 'pgd_epsilon' is not admissible: {err}"
        raise ConfigError(emsg) from err
    return epsilon


def _cell_bounds(
    config: ExperimentConfig, spec: ProblemSpec, n: int, t: int, opt_gap: float
) -> list[BoundReport]:
    c, d = spec.constants, spec.d
    if d < 2:
        return []

    if spec.is_convex and config.algorithm is not Algorithm.PGD:
        opt_bound = gd_opt_bound if config.algorithm is Algorithm.GD else sgd_opt_bound
        eps_t = opt_bound(c, t)
        return [
            convex_stability_bound(c, n, d, eps_t),
            convex_excess_bound(c, n, d, eps_t),
        ]

    reports = [good_event_prob_bound(c, n, d), local_minima_gen_bound(c, n, d)]
    if config.algorithm is Algorithm.PGD and t >= 1:
        gap = 0.0 if math.isnan(opt_gap) else max(opt_gap, 0.0)
        reports.append(pgd_corollary_excess_bound(c, n, d, t, opt_gap=gap))
    return reports


def _mean_se(frame: pd.DataFrame, column: str) -> tuple[float, float]:
    values = frame[column].dropna()
    if values.empty:
        return math.nan, math.nan
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return float(values.mean()), se


def _cell_assertions(
    config: ExperimentConfig,
    spec: ProblemSpec,
    cell: pd.DataFrame,
    bounds: Sequence[BoundReport],
) -> list[Assertion]:
    n, t = int(cell["n"].iloc[0]), int(cell["t"].iloc[0])
    stab, stab_se = _mean_se(cell, "stability_pair_diff")
    gap, gap_se = _mean_se(cell, "gap")
    excess, excess_se = _mean_se(cell, "excess")
    opt, opt_se = _mean_se(cell, "opt_gap")

    assertions = [
        Assertion(
            "gap_within_stability",
            n,
            t,
            abs(gap),
            stab + SIGMA * math.hypot(stab_se, gap_se),
            abs(gap) <= stab + SIGMA * math.hypot(stab_se, gap_se),
        )
    ]

    if not cell["opt_gap"].isna().any():
        allowance = opt + abs(gap) + SIGMA * (excess_se + opt_se + gap_se)
        assertions.append(
            Assertion(
                "excess_decomposition", n, t, excess, allowance, excess <= allowance
            )
        )

        c = spec.constants
        if spec.is_convex and config.algorithm is Algorithm.GD and t >= 1:
            worst = float(cell["opt_gap"].max())
            bound = gd_opt_bound(c, t)
            assertions.append(
                Assertion(
                    "gd_opt_rate",
                    n,
                    t,
                    worst,
                    bound,
                    worst <= bound * (1 + 1e-12) + 1e-15,
                )
            )
        if spec.is_convex and config.algorithm is Algorithm.SGD:
            bound = sgd_opt_bound(c, t)
            assertions.append(
                Assertion(
                    "sgd_opt_rate", n, t, opt, bound, opt - SIGMA * opt_se <= bound
                )
            )

    for report in bounds:
        if report.name == "convex_stability":
            measured, se = stab, stab_se
        elif report.name in ("convex_excess", "pgd_corollary_excess"):
            if any("too small" in note for note in report.notes):
                continue
            measured, se = excess, excess_se
        else:
            continue
        assertions.append(
            Assertion(
                report.name,
                n,
                t,
                measured,
                report.total,
                measured - SIGMA * se <= report.total,
            )
        )
    return assertions


def _finite(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else str(value)
    if isinstance(value, dict):
        return {key: _finite(item) for key, item in value.items()}
    if isinstance(value, list | tuple):
        return [_finite(item) for item in value]
    return value


def _write_json(data: Any, path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        json.dump(_finite(data), fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_suite(
    config: ExperimentConfig, *, output_dir: str | Path | None = None
) -> SuiteOutcome:
    """Run the ``(n, t, replicate)`` grid of an experiment.

    Writes ``replicates.csv``, ``aggregate.csv``, ``bounds.csv`` and
    ``summary.json`` to the output directory, and ``failures.json`` listing
    each failed assertion with its measured and bound values.

    Parameters
    ----------
    config : ExperimentConfig
        The validated experiment.
    output_dir : str or Path, optional
        Override of the configured output directory. The
        ``STABILAB_OUTPUT_DIR`` environment variable takes precedence.

    Returns
    -------
    SuiteOutcome
        Exit code ``0`` when every assertion passed, otherwise ``2``.

    Raises
    ------
    ConfigError
        If the problem cannot be built or the PGD tolerance is not
        admissible, before any run.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    try:
        spec = build_problem(config.problem, config.problem_params)
    except InputError as err:
        emsg = f"Config key 'problem.params' is invalid: {err}"
        raise ConfigError(emsg) from err
    epsilon = _epsilon(config, spec)

    target = resolve_output_dir(
        output_dir if output_dir is not None else config.output_dir
    )
    target.mkdir(parents=True, exist_ok=True)

    results: list[ReplicateResult] = []
    bound_rows: list[dict[str, Any]] = []
    aggregate_rows: list[dict[str, Any]] = []
    assertions: list[Assertion] = []

    for n in config.n_values:
        for t in config.t_values:
            logger.info("running %s n=%d t=%d", spec.name, n, t)
            cell_results = replicate_results(
                spec,
                config.algorithm,
                n,
                t,
                config.replicates,
                config.base_seed,
                n_jobs=config.n_jobs,
                probe_count=config.probe_count,
                algo_seeds_per_replicate=config.algo_seeds_per_replicate,
                pgd_epsilon=epsilon,
                record_stride=config.record_stride,
                excess=True,
            )
            results.extend(cell_results)
            cell = pd.DataFrame([result.to_row() for result in cell_results])

            opt_gap, _ = _mean_se(cell, "opt_gap")
            bounds = _cell_bounds(config, spec, n, t, opt_gap)
            bound_rows.extend({"n": n, "t": t, **report.to_row()} for report in bounds)

            row: dict[str, Any] = {"problem": spec.name, "n": n, "t": t}
            for metric in METRICS:
                mean, std_error = _mean_se(cell, metric)
                row[f"{metric}_mean"], row[f"{metric}_std_error"] = mean, std_error
            row |= {f"bound_{report.name}": report.total for report in bounds}
            aggregate_rows.append(row)
            assertions.extend(_cell_assertions(config, spec, cell, bounds))

    replicates = pd.DataFrame([result.to_row() for result in results])
    replicates = replicates.sort_values(["n", "t", "replicate"], kind="stable")
    write_table(replicates, target / "replicates.csv", "replicates")
    write_table(pd.DataFrame(aggregate_rows), target / "aggregate.csv", "aggregate")
    write_table(pd.DataFrame(bound_rows), target / "bounds.csv", "bounds")

    outcome = SuiteOutcome(
        exit_code=EXIT_ASSERTION
        if any(not item.passed for item in assertions)
        else EXIT_OK,
        output_dir=target,
        assertions=tuple(assertions),
    )

    summary = {
        "config": config.to_dict(),
        "problem": {"name": spec.name, "params": spec.params},
        "constants": spec.constants.to_dict(),
        "pgd_epsilon": epsilon,
        "prng": PRNG_ALGORITHM,
        "seed_derivation": SEED_DERIVATION,
        "packages": Report().versions,
        "aggregate": aggregate_rows,
        "bounds": bound_rows,
        "assertions": [asdict(item) for item in assertions],
        "exit_code": outcome.exit_code,
    }
    _write_json(summary, target / "summary.json")
    if outcome.failures:
        failures = [asdict(item) for item in outcome.failures]
        _write_json(failures, target / "failures.json")
        logger.warning("%d suite assertion(s) failed", len(outcome.failures))

    return outcome
