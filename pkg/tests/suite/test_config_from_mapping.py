# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for :func:`stabilab.suite.config_from_mapping`."""

from __future__ import annotations

from pathlib import Path

import pytest

from stabilab.common import (
    DEFAULT_PROBE_COUNT,
    DEFAULT_REPLICATES,
    Algorithm,
    ConfigError,
)
from stabilab.suite import config_from_mapping


def test_defaults(data):
    """Test omitted keys take their defaults."""
    config = config_from_mapping(data)
    assert config.problem == "quadratic_mean"
    assert config.problem_params == {"d": 2}
    assert config.algorithm is Algorithm.GD
    assert config.n_values == (20, 40)
    assert config.t_values == (1, 5)
    assert config.replicates == DEFAULT_REPLICATES
    assert config.probe_count == DEFAULT_PROBE_COUNT
    assert config.algo_seeds_per_replicate == 1
    assert config.record_stride == 1
    assert config.n_jobs == 1
    assert config.base_seed == 0
    assert config.output_dir is None
    assert config.pgd_epsilon is None


def test_overrides(data):
    """Test explicit keys are honoured."""
    data |= {"replicates": 7, "base_seed": 11, "output_dir": "results"}
    config = config_from_mapping(data)
    assert config.replicates == 7
    assert config.base_seed == 11
    assert config.output_dir == Path("results")
    assert config.to_dict()["output_dir"] == "results"
    assert config.to_dict()["algorithm"] == "gd"


def test_pgd_epsilon(data):
    """Test the PGD tolerance is accepted with the PGD algorithm."""
    data |= {"algorithm": "pgd", "pgd_epsilon": 1}
    config = config_from_mapping(data)
    assert config.algorithm is Algorithm.PGD
    assert config.pgd_epsilon == 1.0
    assert isinstance(config.pgd_epsilon, float)


@pytest.mark.parametrize(
    ("changes", "match"),
    [
        ({"learning_rate": 0.1}, "Unknown config key 'learning_rate'."),
        ({"algorithm": "adam"}, "Config key 'algorithm' expects"),
        ({"algorithm": 1}, "Config key 'algorithm' expects"),
        ({"n_values": [40, 20]}, "strictly ascending"),
        ({"n_values": []}, "non-empty array"),
        ({"t_values": [1, "5"]}, r"'t_values\[1\]' expects an integer"),
        ({"t_values": [0, 5]}, r"'t_values\[0\]' expects an integer >= 1"),
        ({"replicates": True}, "'replicates' expects an integer"),
        ({"probe_count": 0}, "'probe_count' expects an integer >= 1"),
        ({"base_seed": -1}, "'base_seed' expects an integer >= 0"),
        ({"output_dir": 3}, "'output_dir' expects a string"),
        ({"pgd_epsilon": 0.1}, "only valid with algorithm 'pgd'"),
        ({"problem": "quadratic_mean"}, "'problem' expects a table"),
        ({"problem": {"name": "mnist"}}, "'problem.name' expects one of"),
        ({"problem": {"name": "double_well", "seed": 1}}, "'problem.seed'"),
        ({"problem": {"name": "double_well", "params": 1}}, "'problem.params'"),
    ],
)
def test_fail(data, changes, match):
    """Test trap of schema violations naming the offending key."""
    data |= changes
    with pytest.raises(ConfigError, match=match):
        _ = config_from_mapping(data)


@pytest.mark.parametrize("key", ["problem", "algorithm", "n_values", "t_values"])
def test_missing_fail(data, key):
    """Test trap of a missing required key."""
    del data[key]
    with pytest.raises(ConfigError, match=f"Missing required config key '{key}'"):
        _ = config_from_mapping(data)


@pytest.mark.parametrize("epsilon", [0.0, -1e-3, True, "small"])
def test_pgd_epsilon_fail(data, epsilon):
    """Test trap of a non-positive or non-numeric PGD tolerance."""
    data |= {"algorithm": "pgd", "pgd_epsilon": epsilon}
    with pytest.raises(ConfigError, match="expects a positive float"):
        _ = config_from_mapping(data)
