# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Entry-point for stabilab command line interface (CLI)."""

from __future__ import annotations

from .cli import main

main()
