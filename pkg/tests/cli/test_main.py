# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Unit-tests for :func:`stabilab.cli.main`."""

from __future__ import annotations

import pytest

from stabilab import __version__ as version
from stabilab.cli import main
from stabilab.config import resolve_output_dir


def test_option_version(runner):
    """Test the --version option returns the stabilab version."""
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0
    assert result.output.strip() == version


def test_option_output_dir(runner):
    """Test the --output-dir option returns the default output directory."""
    result = runner.invoke(main, ["--output-dir"])
    assert result.exit_code == 0
    assert result.output.strip() == str(resolve_output_dir())


def test_option_report(runner):
    """Test the --report option lists the core packages."""
    result = runner.invoke(main, ["--report"])
    assert result.exit_code == 0
    assert "numpy" in result.output
    assert "Philox" in result.output


def test_usage_exit_code(runner):
    """Test click usage errors exit with status 1."""
    result = runner.invoke(main, ["bounds", "--theorem", "nonsense"])
    assert result.exit_code == 1


def test_unknown_command(runner):
    """Test an unknown group option exits with status 1."""
    result = runner.invoke(main, ["--no-such-option"])
    assert result.exit_code == 1


@pytest.mark.parametrize(
    "args",
    [
        ["bounds", "--help"],
        ["certify", "--help"],
        ["run", "--help"],
        ["census", "--help"],
        ["field", "--help"],
        ["pgd-demo", "--help"],
        ["stability", "--help"],
    ],
)
def test_help(runner, args):
    """Test every subcommand offers help."""
    result = runner.invoke(main, args)
    assert result.exit_code == 0
    assert "Usage:" in result.output
