# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Provide :mod:`stabilab` resource configuration.

The :data:`resources` dictionary defines the options used to configure the
location of :mod:`stabilab` artifacts.

The following :data:`resources` dictionary keys are defined:

* ``output_dir`` - The default directory receiving experiment CSV and JSON
  artifacts. The default is the ``stabilab`` directory under
  :func:`platformdirs.user_data_dir`, unless the ``STABILAB_OUTPUT_DIR``
  environment variable is set.

The :data:`resources` dictionary may be overridden at a package **system** or
**environment** level by creating a ``siteconfig.py`` file in the
:mod:`stabilab` package installation root directory and defining an
``update_config`` function that updates the ``resources`` dictionary. For
example:

.. code-block:: python

        def update_config(resources: dict[str, Path]) -> None:
            resources["output_dir"] = Path("/var/lib/stabilab")

The user may override both the default and package level configuration by
defining an ``update_config`` function within a ``stabilabconfig``
`user site-packages <https://docs.python.org/3/library/site.html#site.USER_SITE>`_
module.

Notes
-----
.. versionadded:: 0.1.0

"""

from __future__ import annotations

from os import environ
from pathlib import Path

from platformdirs import user_data_dir

__all__ = ["ENV_OUTPUT_DIR", "resolve_output_dir", "resources"]

ENV_OUTPUT_DIR: str = "STABILAB_OUTPUT_DIR"
"""Environment variable overriding every other output directory setting."""

resources: dict[str, Path] = {
    "output_dir": Path(environ[ENV_OUTPUT_DIR])
    if ENV_OUTPUT_DIR in environ
    else Path(user_data_dir()) / __package__
}
"""Resources configuration dictionary."""


try:
    # system level override of resources dictionary
    from .siteconfig import update_config  # type: ignore[import-not-found]

    update_config(resources)
except ImportError:
    pass

try:
    # user level override of resources dictionary
    from stabilabconfig import update_config  # type: ignore[import-not-found]

    update_config(resources)
except ImportError:
    pass


def resolve_output_dir(configured: str | Path | None = None) -> Path:
    """Resolve the directory receiving experiment artifacts.

    The ``STABILAB_OUTPUT_DIR`` environment variable takes precedence, then
    the `configured` directory, then ``resources["output_dir"]``.

    Parameters
    ----------
    configured : str or Path, optional
        The directory requested by an experiment configuration.

    Returns
    -------
    Path
        The output directory.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if (override := environ.get(ENV_OUTPUT_DIR)) is not None:
        return Path(override)

    if configured is not None:
        return Path(configured)

    return resources["output_dir"]
