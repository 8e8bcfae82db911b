# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Command line interface (CLI) support for the :mod:`stabilab` entry-point.

Usage and configuration errors exit with status 1, failed suite assertions
with status 2.

Notes
-----
.. versionadded:: 0.1.0

"""

from __future__ import annotations

import logging
from pathlib import Path
import tomllib
from typing import TYPE_CHECKING, Any

import click
from click_default_group import DefaultGroup
import lazy_loader as lazy

from . import __version__
from .bounds import BOUNDS, TailKind, Variant, evaluate
from .common import Algorithm, InputError
from .config import resolve_output_dir
from .core import ConstantsBundle, as_param_vector
from .landscape import minima_census, min_eig_field
from .optimizers import PgdConfig, check_sosp, largest_admissible_epsilon, run_pgd_sosp
from .problems import PROBLEM_BUILDERS, build_problem
from .report import Report
from .stability import stability_sweep
from .suite import EXIT_USAGE, parse_config, run_suite, write_table

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    import pandas as pd

    from .problems import ProblemSpec

# lazy import third-party dependencies
pd = lazy.load("pandas")

__all__ = ["main"]

CONTEXT_SETTINGS = {"help_option_names": ["-h", "--help"]}

FG_COLOUR: str = "cyan"

BOUND_ARGUMENTS: dict[str, str] = {
    "n": "n",
    "d": "d",
    "t": "t",
    "eps": "eps",
    "eps_t": "eps_t",
    "zeta": "zeta_t",
    "delta": "delta",
    "delta_prime": "delta_prime",
    "opt_gap": "opt_gap",
    "variant": "variant",
    "which": "which",
    "delta_dev": "delta_dev",
}
"""Map of ``bounds`` command options to bound calculator arguments."""


class StabilabGroup(DefaultGroup):
    """Command group mapping usage and input errors to exit status 1."""

    def make_context(self, *args: Any, **kwargs: Any) -> click.Context:
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as err:
            err.exit_code = EXIT_USAGE
            raise

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except click.UsageError as err:
            err.exit_code = EXIT_USAGE
            raise
        except InputError as err:
            raise click.ClickException(str(err)) from err


def _parse_value(text: str) -> Any:
    try:
        return tomllib.loads(f"value = {text}")["value"]
    except tomllib.TOMLDecodeError:
        return text


def _params(items: Sequence[str]) -> dict[str, Any]:
    params = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            emsg = f"Expected a problem parameter as KEY=VALUE, got {item!r}."
            raise click.BadParameter(emsg, param_hint="--param")
        params[key.strip()] = _parse_value(value.strip())
    return params


def _problem(name: str, items: Sequence[str]) -> ProblemSpec:
    spec = build_problem(name, _params(items))
    click.echo("Problem ", nl=False, err=True)
    click.secho(f"{spec!r}", fg=FG_COLOUR, err=True)
    return spec


def _integers(text: str) -> list[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as err:
        emsg = f"Expected comma separated integers, got {text!r}."
        raise click.BadParameter(emsg) from err


def _float_option(
    flag: str, name: str, default: float | None, text: str
) -> Callable[[Callable[..., Any]], Callable[..., Any]]:
    return click.option(
        flag,
        name,
        type=float,
        default=default,
        show_default=default is not None,
        help=text,
    )


def _write(frame: pd.DataFrame, output: str | None, table: str) -> None:
    if output is None:
        click.echo(frame.to_csv(index=False, lineterminator="\n"), nl=False)
        return
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_table(frame, path, table)
    click.echo("Wrote ", nl=False)
    click.secho(f"{path}", fg=FG_COLOUR)


problem_option = click.option(
    "-p",
    "--problem",
    type=click.Choice(sorted(PROBLEM_BUILDERS), case_sensitive=False),
    required=True,
    help="The problem family.",
)
param_option = click.option(
    "-P",
    "--param",
    "params",
    multiple=True,
    metavar="KEY=VALUE",
    help="A problem family parameter, may be repeated.",
)
output_option = click.option(
    "-o",
    "--output",
    type=click.Path(dir_okay=False, writable=True),
    help="Write the CSV table to this file rather than standard output.",
)


@click.group(
    cls=StabilabGroup,
    default="bounds",
    invoke_without_command=True,
    context_settings=CONTEXT_SETTINGS,
)
@click.option(
    "-d",
    "--output-dir",
    is_flag=True,
    help="Show the default stabilab output directory.",
)
@click.option(
    "-r",
    "--report",
    is_flag=True,
    help="Show environment package report.",
)
@click.option(
    "-v",
    "--version",
    is_flag=True,
    help="Show stabilab package version.",
)
@click.option("--verbose", is_flag=True, help="Enable debug logging.")
def main(
    output_dir: bool, report: bool, version: bool, verbose: bool
) -> None:  # numpydoc ignore=PR01
    """To get help for stabilab commands, simply use "stabilab COMMAND --help"."""
    if verbose:
        logging.basicConfig(level=logging.DEBUG)

    if version:
        click.secho(f"{__version__}", fg=FG_COLOUR)

    if report:
        click.echo(Report())

    if output_dir:
        click.secho(f"{resolve_output_dir()}", fg=FG_COLOUR)


@main.command(no_args_is_help=True)
@click.option(
    "-T",
    "--theorem",
    type=click.Choice(sorted(BOUNDS), case_sensitive=False),
    required=True,
    help="The bound to evaluate.",
)
@_float_option("--L0", "L0", 1.0, "Loss Lipschitz constant.")
@_float_option("--L1", "L1", 1.0, "Gradient Lipschitz constant.")
@_float_option("--L2", "L2", 0.0, "Hessian Lipschitz constant.")
@_float_option("--lam", "lam", None, "Curvature floor. Defaults to min(1, L1).")
@_float_option("--lambda-saddle", "lambda_saddle", None, "Strict-saddle curvature.")
@_float_option("--alpha", "alpha", 1.0, "Strict-saddle gradient threshold.")
@_float_option("--beta", "beta", None, "Boundary gradient floor.")
@_float_option("--M", "M", 1.0, "Loss upper bound.")
@_float_option("--D", "D", 2.0, "Domain diameter.")
@click.option("--K", "K", type=int, default=1, show_default=True, help="Minima count.")
@_float_option("--n", "n", None, "Training set size.")
@click.option("--d", type=int, help="Parameter dimension.")
@click.option("--t", type=int, help="Step count.")
@_float_option("--eps", "eps", None, "PGD tolerance.")
@_float_option("--eps-t", "eps_t", None, "Optimization error.")
@_float_option("--zeta", "zeta", None, "Gradient norm guarantee.")
@_float_option("--delta", "delta", None, "Failure probability of the guarantee.")
@_float_option("--delta-prime", "delta_prime", None, "Spurious minima probability.")
@_float_option("--opt-gap", "opt_gap", None, "Measured optimization gap.")
@click.option("--variant", type=click.Choice(Variant.values()), help="Bound variant.")
@click.option("--which", type=click.Choice(TailKind.values()), help="Tail bound.")
@_float_option("--delta-dev", "delta_dev", None, "Tail deviation.")
@click.option("--terms", is_flag=True, help="Show the term breakdown.")
def bounds(
    theorem: str,
    L0: float,  # noqa: N803
    L1: float,  # noqa: N803
    L2: float,  # noqa: N803
    lam: float | None,
    lambda_saddle: float | None,
    alpha: float,
    beta: float | None,
    M: float,  # noqa: N803
    D: float,  # noqa: N803
    K: int,  # noqa: N803
    terms: bool,
    **arguments: Any,
) -> None:  # numpydoc ignore=PR01
    """Evaluate a bound from constants given as options."""
    constants = ConstantsBundle(
        L0=L0,
        L1=L1,
        L2=L2,
        lam=min(1.0, L1) if lam is None else lam,
        alpha=alpha,
        beta=beta,
        M=M,
        D=D,
        K=K,
        lambda_saddle=lambda_saddle,
    )
    kwargs = {
        BOUND_ARGUMENTS[key]: value
        for key, value in arguments.items()
        if value is not None
    }
    report = evaluate(theorem, constants, **kwargs)
    click.echo(f"{report.total!r}")

    if terms:
        for name, value in report.terms.items():
            click.echo(f"  {name}: ", nl=False)
            click.secho(f"{value!r}", fg=FG_COLOUR)
        if report.probability:
            click.echo(f"  clamped: {report.clamped!r}")
        for note in report.notes:
            click.secho(f"  note: {note}", fg="yellow")


@main.command(no_args_is_help=True)
@problem_option
@param_option
def certify(problem: str, params: tuple[str, ...]) -> None:  # numpydoc ignore=PR01
    """Build a problem and show its certified constants."""
    spec = _problem(problem, params)
    for name, value in spec.constants.to_dict().items():
        click.echo(f"{name:>16}: ", nl=False)
        click.secho(f"{value!r}", fg=FG_COLOUR)
    click.echo("\n👍 All done!")


@main.command(no_args_is_help=True)
@click.argument("config", type=click.Path(exists=True, dir_okay=False, readable=True))
@click.option(
    "-o",
    "--output-dir",
    type=click.Path(file_okay=False, writable=True),
    help="Override the configured output directory.",
)
@click.pass_context
def run(
    ctx: click.Context, config: str, output_dir: str | None
) -> None:  # numpydoc ignore=PR01
    """Run the experiment suite of a TOML configuration."""
    outcome = run_suite(parse_config(config), output_dir=output_dir)
    click.echo("Artifacts in ", nl=False)
    click.secho(f"{outcome.output_dir}", fg=FG_COLOUR)

    if outcome.failures:
        for failure in outcome.failures:
            click.secho(
                f"FAILED {failure.name} n={failure.n} t={failure.t}: "
                f"measured {failure.measured!r} > bound {failure.bound!r}",
                fg="red",
            )
        ctx.exit(outcome.exit_code)

    click.echo(f"{len(outcome.assertions)} assertion(s) passed.")
    click.echo("\n👍 All done!")


@main.command(no_args_is_help=True)
@problem_option
@param_option
@click.option("-n", "--n", "n", type=int, required=True, help="Training set size.")
@click.option("-s", "--seed", type=int, default=0, show_default=True, help="Data seed.")
@click.option(
    "--starts", type=int, default=200, show_default=True, help="Multistart runs."
)
@click.option("--merge-radius", type=float, help="Merge radius of found minima.")
@output_option
def census(
    problem: str,
    params: tuple[str, ...],
    n: int,
    seed: int,
    starts: int,
    merge_radius: float | None,
    output: str | None,
) -> None:  # numpydoc ignore=PR01
    """Find every empirical local minimum by multistart descent."""
    spec = _problem(problem, params)
    result = minima_census(spec, spec.sample(seed, n), starts, merge_radius, seed)
    _write(result.to_frame(), output, "census")
    colour = "green" if result.passed else "red"
    click.secho(
        f"census {'passed' if result.passed else 'failed'}: {result.count} found, "
        f"{len(result.matched)} of {result.K} matched",
        fg=colour,
        err=True,
    )


@main.command(no_args_is_help=True)
@problem_option
@param_option
@click.option(
    "-n", "--n", "n", type=int, help="Training set size, population risk if omitted."
)
@click.option("-s", "--seed", type=int, default=0, show_default=True, help="Data seed.")
@click.option("-g", "--grid-resolution", type=float, help="Grid spacing.")
@output_option
def field(
    problem: str,
    params: tuple[str, ...],
    n: int | None,
    seed: int,
    grid_resolution: float | None,
    output: str | None,
) -> None:  # numpydoc ignore=PR01
    """Map gradient norms and smallest Hessian eigenvalues over a grid."""
    spec = _problem(problem, params)
    S = None if n is None else spec.sample(seed, n)
    result = min_eig_field(spec, S, grid_resolution)
    _write(result.to_frame(), output, "field")
    if not result.passed:
        click.secho(
            f"strict-saddle implication fails at {result.failing.shape[0]} point(s)",
            fg="red",
            err=True,
        )


@main.command(name="pgd-demo", no_args_is_help=True)
@problem_option
@param_option
@click.option(
    "-n",
    "--n",
    "n",
    type=int,
    default=100,
    show_default=True,
    help="Training set size.",
)
@click.option("-s", "--seed", type=int, default=0, show_default=True, help="Data seed.")
@click.option(
    "-e", "--epsilon", type=float, help="Tolerance, defaults to the largest admissible."
)
@click.option(
    "--start", help="Comma separated start point, defaults to the domain center."
)
@click.option("--max-steps", type=int, help="Step cap.")
@output_option
def pgd_demo(
    problem: str,
    params: tuple[str, ...],
    n: int,
    seed: int,
    epsilon: float | None,
    start: str | None,
    max_steps: int | None,
    output: str | None,
) -> None:  # numpydoc ignore=PR01
    """Dump one saddle-escaping PGD trajectory."""
    spec = _problem(problem, params)
    S = spec.sample(seed, n)
    if epsilon is None:
        epsilon = largest_admissible_epsilon(spec.constants)
    w0 = (
        spec.domain.center
        if start is None
        else as_param_vector(
            [float(item) for item in start.split(",")], dimension=spec.d
        )
    )
    config = PgdConfig(epsilon, spec.constants)
    if max_steps is not None:
        config = PgdConfig(epsilon, spec.constants, max_steps=max_steps)
    trace = run_pgd_sosp(spec, S, w0, config)

    frame = pd.DataFrame(trace.iterates, columns=[f"w{j}" for j in range(spec.d)])
    frame.insert(0, "step", trace.recorded_steps)
    frame["emp_risk"] = trace.empirical_risks
    frame["grad_norm"] = trace.grad_norms
    _write(frame, output, "pgd_trajectory")

    check = check_sosp(spec, S, trace.terminal, epsilon, config.gamma)
    click.secho(
        f"halt {trace.halt_reason} after {trace.step_count} steps, "
        f"sosp check {'passed' if check.passed else 'failed'}",
        fg="green" if check.passed else "red",
        err=True,
    )


@main.command(no_args_is_help=True)
@problem_option
@param_option
@click.option(
    "-n", "--n", "n_values", required=True, help="Comma separated training set sizes."
)
@click.option(
    "-t", "--t", "t", type=int, default=100, show_default=True, help="Step count."
)
@click.option(
    "-a",
    "--algorithm",
    type=click.Choice(Algorithm.values()),
    default="gd",
    show_default=True,
    help="The algorithm.",
)
@click.option(
    "-R",
    "--replicates",
    type=int,
    default=50,
    show_default=True,
    help="Replicates per size.",
)
@click.option(
    "--probe-count",
    type=int,
    default=512,
    show_default=True,
    help="Probes per replicate.",
)
@click.option("-s", "--seed", type=int, default=0, show_default=True, help="Base seed.")
@click.option(
    "-j", "--n-jobs", type=int, default=1, show_default=True, help="Work pool size."
)
def stability(
    problem: str,
    params: tuple[str, ...],
    n_values: str,
    t: int,
    algorithm: str,
    replicates: int,
    probe_count: int,
    seed: int,
    n_jobs: int,
) -> None:  # numpydoc ignore=PR01
    """Sweep the stability estimate over training set sizes and fit its slope."""
    spec = _problem(problem, params)
    sizes = _integers(n_values)
    report = stability_sweep(
        spec,
        algorithm,
        sizes,
        t,
        replicates,
        seed,
        probe_count=probe_count,
        n_jobs=n_jobs,
    )
    for estimate, gap in zip(report.stability, report.gaps, strict=True):
        click.echo(
            f"n={estimate.n:>6}  "
            f"stability={estimate.value:.6e} ± {estimate.std_error:.2e}"
            f"  gap={gap.value:+.6e} ± {gap.std_error:.2e}"
        )
    fit = report.fit
    click.echo("slope ", nl=False)
    click.secho(f"{fit.slope:.4f} [{fit.low:.4f}, {fit.high:.4f}]", fg=FG_COLOUR)
    click.echo("\n👍 All done!")