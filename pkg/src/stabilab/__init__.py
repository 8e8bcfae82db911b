# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Algorithmic stability and generalization laboratory.

Provides:
  1. Synthetic learning problems with certified smoothness, curvature and
     strict-saddle constants.
  2. Projected gradient descent, projected stochastic gradient descent and
     saddle-escaping projected gradient descent over ball domains.
  3. Closed-form calculators of stability, generalization and excess risk
     bounds, for convex and strict-saddle non-convex risks.
  4. Monte-Carlo estimators that measure the same quantities, with a
     reproducible experiment suite to compare both.

Notes
-----
.. versionadded:: 0.1.0

"""

from __future__ import annotations

import lazy_loader as lazy

# lazy import submodules
(__getattr__, __dir__, __all__) = lazy.attach_stub(__name__, __file__)

try:
    from ._version import version as __version__
except ModuleNotFoundError:
    __version__ = "unknown"
