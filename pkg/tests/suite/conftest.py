# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""pytest fixture infra-structure for :mod:`stabilab.suite` unit-tests."""

from __future__ import annotations

import pytest

from stabilab.config import ENV_OUTPUT_DIR

CONFIG_TOML = """\
algorithm = "gd"
n_values = [20, 40]
t_values = [1, 5]
replicates = 20
probe_count = 32
base_seed = 3

[problem]
name = "quadratic_mean"

[problem.params]
d = 2
"""


@pytest.fixture
def data():
    """Fixture generates a minimal valid configuration mapping."""
    return {
        "problem": {"name": "quadratic_mean", "params": {"d": 2}},
        "algorithm": "gd",
        "n_values": [20, 40],
        "t_values": [1, 5],
    }


@pytest.fixture
def config_file(tmp_path):
    """Fixture generates a small convex experiment configuration file."""
    path = tmp_path / "experiment.toml"
    path.write_text(CONFIG_TOML, encoding="utf-8")
    return path


@pytest.fixture(autouse=True)
def no_env_output_dir(monkeypatch):
    """Fixture removes any output directory override from the environment."""
    monkeypatch.delenv(ENV_OUTPUT_DIR, raising=False)
