# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Nearest point search over sets of parameter vectors.

Notes
-----
.. versionadded:: 0.1.0

"""

from __future__ import annotations

from typing import TYPE_CHECKING

import lazy_loader as lazy
from pykdtree.kdtree import KDTree as pyKDTree

from .common import InputError

if TYPE_CHECKING:
    import numpy as np
    from numpy.typing import ArrayLike

    type NearestNeighbours = tuple[np.ndarray, np.ndarray]
    """Type alias for a tuple of nearest neighbour distances and indices."""

# lazy import third-party dependencies
np = lazy.load("numpy")

__all__ = [
    "KDTREE_EPSILON",
    "KDTREE_LEAF_SIZE",
    "KDTree",
    "NearestNeighbours",
]

KDTREE_EPSILON: float = 0.0
"""The default kd-tree nearest neighbour epsilon."""

KDTREE_LEAF_SIZE: int = 16
"""The default kd-tree leaf-size."""


class KDTree:  # numpydoc ignore=PR01
    """Construct a kd-tree for nearest neighbour search of parameter vectors.

    Distances are recomputed in float64 from the matched points, so they are
    exact Euclidean distances rather than the tree's internal values.

    For further details, see https://github.com/storpipfugl/pykdtree.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    def __init__(self, points: ArrayLike, /, *, leaf_size: int | None = None) -> None:
        """Construct kd-tree for nearest neighbour search of `points`.

        Parameters
        ----------
        points : ArrayLike
            The ``(m, d)`` points registered with the tree, ``m >= 1``.
        leaf_size : int, optional
            The number of data points per tree leaf. Defaults to
            :data:`KDTREE_LEAF_SIZE`.

        Notes
        -----
        .. versionadded:: 0.1.0

        """
        if leaf_size is None:
            leaf_size = KDTREE_LEAF_SIZE

        data = np.ascontiguousarray(np.atleast_2d(points), dtype=np.float64)
        if data.ndim != 2 or data.shape[0] == 0:
            emsg = (
                "Require a non-empty (m, d) array of points, got shape "
                f"{data.shape}."
            )
            raise InputError(emsg)

        self._points = data
        self._kdtree = pyKDTree(data, leafsize=int(leaf_size))

    def __repr__(self) -> str:
        klass = self.__class__.__name__
        return f"{klass}(n_points={self.n_points}, dimension={self.dimension})"

    @property
    def dimension(self) -> int:
        """The dimension of the registered points."""
        return int(self._points.shape[1])

    @property
    def n_points(self) -> int:
        """Number of points registered with the kd-tree."""
        return int(self._points.shape[0])

    @property
    def points(self) -> np.ndarray:
        """A copy of the points registered with the kd-tree."""
        return self._points.copy()

    def query(
        self,
        queries: ArrayLike,
        /,
        *,
        epsilon: float | None = None,
    ) -> NearestNeighbours:
        """Query the kd-tree for the nearest neighbour of each query point.

        Parameters
        ----------
        queries : ArrayLike
            One ``(d,)`` point or an ``(m, d)`` array of points.
        epsilon : non-negative float, optional
            Return approximate nearest neighbours, no further than
            ``(1 + epsilon)`` times the true nearest distance. Defaults to
            :data:`KDTREE_EPSILON`.

        Returns
        -------
        NearestNeighbours
            The Euclidean distance to and index of the nearest neighbour of
            each query point.

        Notes
        -----
        .. versionadded:: 0.1.0

        """
        if epsilon is None:
            epsilon = KDTREE_EPSILON

        data = np.ascontiguousarray(np.atleast_2d(queries), dtype=np.float64)
        if data.shape[1] != self.dimension:
            emsg = (
                f"Require query points of dimension {self.dimension}, "
                f"got {data.shape[1]}."
            )
            raise InputError(emsg)

        _, index = self._kdtree.query(data, k=1, eps=epsilon)
        index = np.asarray(index, dtype=np.intp)
        distance = np.linalg.norm(self._points[index] - data, axis=1)
        return distance, index
