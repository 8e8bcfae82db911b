# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""pytest fixture infra-structure for :mod:`stabilab.cli` unit-tests."""

from __future__ import annotations

from click.testing import CliRunner
import pytest

from stabilab.config import ENV_OUTPUT_DIR


@pytest.fixture
def runner(monkeypatch):
    """Fixture generates a command line runner without an output override."""
    monkeypatch.delenv(ENV_OUTPUT_DIR, raising=False)
    return CliRunner()
