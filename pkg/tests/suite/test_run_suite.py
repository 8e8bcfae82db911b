# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for :func:`stabilab.suite.run_suite`."""

from __future__ import annotations

import dataclasses
import json

import pandas as pd
import pytest

from stabilab.bounds import BoundReport
from stabilab.common import ConfigError
from stabilab.config import ENV_OUTPUT_DIR
from stabilab.suite import (
    EXIT_ASSERTION,
    EXIT_OK,
    SCHEMA_VERSION,
    config_from_mapping,
    parse_config,
    run_suite,
)

ARTIFACTS = ["aggregate.csv", "bounds.csv", "replicates.csv", "summary.json"]


def _data_lines(path):
    """Return the lines of a table after its timestamp line."""
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# generated: ")
    return lines[1:]


@pytest.fixture
def config(config_file):
    """Fixture generates the parsed small convex experiment."""
    return parse_config(config_file)


def test_artifacts(config, tmp_path):
    """Test a passing run writes every table and the summary."""
    outcome = run_suite(config, output_dir=tmp_path / "out")
    assert outcome.exit_code == EXIT_OK
    assert outcome.failures == ()
    assert outcome.output_dir == tmp_path / "out"
    assert sorted(path.name for path in outcome.output_dir.iterdir()) == ARTIFACTS

    lines = _data_lines(outcome.output_dir / "replicates.csv")
    assert lines[0].startswith(f"# schema: stabilab.replicates v{SCHEMA_VERSION} [")
    replicates = pd.read_csv(outcome.output_dir / "replicates.csv", comment="#")
    assert len(replicates) == 2 * 2 * 20
    assert list(replicates.columns[:10]) == [
        "problem",
        "n",
        "t",
        "replicate",
        "seed",
        "emp_risk",
        "pop_risk",
        "gap",
        "stability_pair_diff",
        "halt_reason",
    ]

    aggregate = pd.read_csv(outcome.output_dir / "aggregate.csv", comment="#")
    assert list(zip(aggregate["n"], aggregate["t"], strict=True)) == [
        (20, 1),
        (20, 5),
        (40, 1),
        (40, 5),
    ]
    assert "bound_convex_stability" in aggregate.columns

    with (outcome.output_dir / "summary.json").open(encoding="utf-8") as fh:
        summary = json.load(fh)
    assert summary["exit_code"] == EXIT_OK
    assert summary["config"]["base_seed"] == 3
    assert summary["prng"] == "numpy.random.Philox"
    assert "numpy" in summary["packages"]
    names = {item["name"] for item in summary["assertions"]}
    assert {"gap_within_stability", "excess_decomposition", "gd_opt_rate"} <= names


def test_deterministic(config, tmp_path):
    """Test two runs of one configuration write identical data rows."""
    first = run_suite(config, output_dir=tmp_path / "first")
    second = run_suite(config, output_dir=tmp_path / "second")
    for name in ("replicates.csv", "aggregate.csv", "bounds.csv"):
        assert _data_lines(first.output_dir / name) == _data_lines(
            second.output_dir / name
        )


def test_env_output_dir(config, tmp_path, monkeypatch):
    """Test the environment variable overrides the requested directory."""
    monkeypatch.setenv(ENV_OUTPUT_DIR, str(tmp_path / "env"))
    small = dataclasses.replace(config, n_values=(20,), t_values=(1,), replicates=3)
    outcome = run_suite(small, output_dir=tmp_path / "ignored")
    assert outcome.output_dir == tmp_path / "env"
    assert (tmp_path / "env" / "replicates.csv").is_file()


def test_failed_assertion(config, tmp_path, mocker):
    """Test a violated bound is reported with exit code 2."""
    report = BoundReport("convex_stability", {}, {"zero": 0.0}, 0.0)
    mocker.patch("stabilab.suite.convex_stability_bound", return_value=report)
    small = dataclasses.replace(config, n_values=(20,), t_values=(1,), replicates=5)
    outcome = run_suite(small, output_dir=tmp_path)
    assert outcome.exit_code == EXIT_ASSERTION
    assert [item.name for item in outcome.failures] == ["convex_stability"]
    with (tmp_path / "failures.json").open(encoding="utf-8") as fh:
        failures = json.load(fh)
    assert failures[0]["name"] == "convex_stability"
    assert failures[0]["bound"] == 0.0


def test_problem_params_fail(data, tmp_path):
    """Test trap of problem parameters the family rejects."""
    data["problem"]["params"] = {"d": 2, "noise_radius": -1.0}
    with pytest.raises(ConfigError, match="'problem.params' is invalid"):
        _ = run_suite(config_from_mapping(data), output_dir=tmp_path)
    assert not (tmp_path / "replicates.csv").exists()


def test_pgd_domain_fail(data, tmp_path):
    """Test trap of saddle-escaping PGD off the unit ball."""
    data["algorithm"] = "pgd"
    with pytest.raises(ConfigError, match="unit ball"):
        _ = run_suite(config_from_mapping(data), output_dir=tmp_path)
