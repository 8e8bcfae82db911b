# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Provide the geometric and dataset primitives shared by every module.

Notes
-----
.. versionadded:: 0.1.0

"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
import math
from typing import TYPE_CHECKING, Any

import lazy_loader as lazy

from .common import InputError

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    import numpy as np
    import scipy.linalg as sla

# lazy import third-party dependencies
np = lazy.load("numpy")
sla = lazy.load("scipy.linalg")

__all__ = [
    "EIGEN_SIGN_TOL",
    "SYMMETRY_TOL",
    "BallDomain",
    "ConstantsBundle",
    "Dataset",
    "ParamVector",
    "as_param_vector",
    "min_eigenvalue",
    "project",
    "smallest_eigenpair",
    "substitute",
    "unit_ball",
]

type ParamVector = np.ndarray
"""A dense float64 vector in the parameter space."""

EIGEN_SIGN_TOL: float = 1e-12
"""Coordinates with magnitude below this are skipped by the eigenvector sign rule."""

SYMMETRY_TOL: float = 1e-10
"""Relative asymmetry tolerated by the symmetric eigen-solver."""


def as_param_vector(v: ArrayLike, /, *, dimension: int | None = None) -> ParamVector:
    """Validate and copy a parameter vector.

    Parameters
    ----------
    v : ArrayLike
        The candidate coordinates.
    dimension : int, optional
        The required dimension.

    Returns
    -------
    ndarray
        A one-dimensional float64 copy of `v`.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    result = np.array(v, dtype=np.float64, ndmin=1)

    if result.ndim != 1:
        emsg = f"Require a one-dimensional parameter vector, got shape {result.shape}."
        raise InputError(emsg)

    if dimension is not None and result.size != dimension:
        emsg = (
            f"Parameter vector has dimension {result.size}, expected {dimension}."
        )
        raise InputError(emsg)

    if not np.all(np.isfinite(result)):
        emsg = "Parameter vector contains non-finite entries."
        raise InputError(emsg)

    return result


@dataclass(frozen=True, eq=False)
class BallDomain:
    """Closed Euclidean ball constraint set.

    Parameters
    ----------
    center : ndarray
        The ball center.
    radius : float
        The strictly positive ball radius.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    center: ParamVector
    radius: float

    def __post_init__(self) -> None:
        center = as_param_vector(self.center)
        center.setflags(write=False)
        object.__setattr__(self, "center", center)

        radius = float(self.radius)
        if not math.isfinite(radius) or radius <= 0:
            emsg = f"Require a finite positive ball radius, got {self.radius}."
            raise InputError(emsg)
        object.__setattr__(self, "radius", radius)

    def __repr__(self) -> str:
        name = self.__class__.__name__
        return f"{name}(center={self.center.tolist()}, radius={self.radius})"

    @property
    def dimension(self) -> int:
        """The dimension of the ambient parameter space."""
        return int(self.center.size)

    @property
    def diameter(self) -> float:
        """The diameter ``D = 2 * radius``."""
        return 2.0 * self.radius

    @property
    def is_unit_ball(self) -> bool:
        """Whether the domain is the origin-centred unit ball."""
        return self.radius == 1.0 and not np.any(self.center)

    def distance_to_center(self, w: ArrayLike) -> float:
        """Return the Euclidean distance from `w` to the center."""
        return float(np.linalg.norm(np.asarray(w, dtype=np.float64) - self.center))

    def contains(self, w: ArrayLike, atol: float = 0.0) -> bool:
        """Whether `w` lies inside the closed ball, up to `atol`."""
        return self.distance_to_center(w) <= self.radius + atol

    def on_boundary(self, w: ArrayLike, tol: float) -> bool:
        """Whether `w` lies within `tol` of the bounding sphere."""
        return self.distance_to_center(w) >= self.radius - tol

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Draw points uniformly from the ball.

        Parameters
        ----------
        rng : Generator
            The random stream.
        count : int
            The number of points.

        Returns
        -------
        ndarray
            Array of shape ``(count, dimension)``.

        Notes
        -----
        .. versionadded:: 0.1.0

        """
        d = self.dimension
        directions = rng.standard_normal((count, d))
        norms = np.linalg.norm(directions, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        radii = self.radius * rng.random((count, 1)) ** (1.0 / d)
        points = self.center + radii * directions / norms
        return np.array([project(self, point) for point in points]).reshape(count, d)


def unit_ball(d: int) -> BallDomain:
    """Return the origin-centred unit ball in ``R^d``."""
    return BallDomain(center=np.zeros(d), radius=1.0)


def project(domain: BallDomain, v: ArrayLike, /) -> ParamVector:
    """Project a vector onto the closed ball.

    Interior points are returned unchanged, otherwise the point is scaled
    radially onto the bounding sphere. The radial scale is nudged towards
    zero, one unit in the last place at a time, until the result passes the
    membership test, so the result is always a member and projecting it
    again returns it unchanged.

    Parameters
    ----------
    domain : BallDomain
        The constraint set.
    v : ArrayLike
        The vector to project.

    Returns
    -------
    ndarray
        The projection of `v`.

    Notes
    -----
    .. versionadded:: 0.1.0

    Examples
    --------
    >>> import numpy as np
    >>> project(unit_ball(2), [0.5, 0.0])
    array([0.5, 0. ])
    >>> bool(np.allclose(project(unit_ball(2), [3.0, 4.0]), [0.6, 0.8]))
    True

    """
    v = as_param_vector(v, dimension=domain.dimension)
    offset = v - domain.center
    norm = np.linalg.norm(offset)

    if norm <= domain.radius:
        return v

    scale = domain.radius / norm
    result = domain.center + scale * offset
    while np.linalg.norm(result - domain.center) > domain.radius:
        scale = np.nextafter(scale, 0.0)
        result = domain.center + scale * offset

    return result


@dataclass(frozen=True, eq=False)
class Dataset:
    """An ordered, immutable collection of samples.

    Each row of `samples` is one sample point ``z``; the row index identifies
    the substitution slot.

    Parameters
    ----------
    samples : ndarray
        Array of shape ``(n, q)`` with ``n >= 1``.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    samples: np.ndarray

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=np.float64)

        if samples.ndim != 2:
            emsg = (
                "Require a two-dimensional (n, q) array of samples, got shape "
                f"{samples.shape}."
            )
            raise InputError(emsg)

        if samples.shape[0] < 1:
            emsg = "Require a dataset with at least one sample."
            raise InputError(emsg)

        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return bool(np.array_equal(self.samples, other.samples))

    __hash__ = None  # type: ignore[assignment]

    def __getitem__(self, index: int) -> np.ndarray:
        return self.samples[index]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(n={self.n}, q={self.sample_dim})"

    @property
    def n(self) -> int:
        """The number of samples."""
        return int(self.samples.shape[0])

    @property
    def sample_dim(self) -> int:
        """The length of one encoded sample."""
        return int(self.samples.shape[1])

    def concat(self, other: Dataset) -> Dataset:
        """Return the dataset of `self` followed by `other`."""
        return Dataset(np.vstack([self.samples, other.samples]))

    def substitute(self, index: int, z_prime: ArrayLike) -> Dataset:
        """Return a copy with the sample at `index` replaced by `z_prime`."""
        return substitute(self, index, z_prime)


def substitute(dataset: Dataset, index: int, z_prime: ArrayLike) -> Dataset:
    """Replace one sample of a dataset.

    Parameters
    ----------
    dataset : Dataset
        The source dataset, left unchanged.
    index : int
        The zero-based substitution slot.
    z_prime : ArrayLike
        The replacement sample.

    Returns
    -------
    Dataset
        The dataset ``S^i`` differing from `dataset` only at `index`.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if not 0 <= index < dataset.n:
        emsg = f"Substitution index {index} out of range for n={dataset.n}."
        raise InputError(emsg)

    z_prime = np.asarray(z_prime, dtype=np.float64)
    if z_prime.shape != (dataset.sample_dim,):
        emsg = (
            f"Replacement sample has shape {z_prime.shape}, expected "
            f"({dataset.sample_dim},)."
        )
        raise InputError(emsg)

    samples = dataset.samples.copy()
    samples[index] = z_prime
    return Dataset(samples)


def _symmetrize(H: ArrayLike) -> np.ndarray:
    matrix = np.asarray(H, dtype=np.float64)

    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        emsg = f"Require a square matrix, got shape {matrix.shape}."
        raise InputError(emsg)

    if not np.all(np.isfinite(matrix)):
        emsg = "Matrix contains non-finite entries."
        raise InputError(emsg)

    asymmetry = np.max(np.abs(matrix - matrix.T), initial=0.0)
    if asymmetry > SYMMETRY_TOL * (1.0 + np.max(np.abs(matrix), initial=0.0)):
        emsg = f"Matrix is not symmetric, maximum asymmetry {asymmetry:.3e}."
        raise InputError(emsg)

    return 0.5 * (matrix + matrix.T)


def smallest_eigenpair(H: ArrayLike) -> tuple[float, ParamVector]:
    """Compute the algebraically smallest eigenvalue and its eigenvector.

    The eigenvector is oriented so that its first coordinate with magnitude
    above :data:`EIGEN_SIGN_TOL` is positive.

    Parameters
    ----------
    H : ArrayLike
        A symmetric real matrix.

    Returns
    -------
    value : float
        The smallest eigenvalue.
    vector : ndarray
        A unit eigenvector for `value`.

    Notes
    -----
    .. versionadded:: 0.1.0

    Examples
    --------
    >>> value, vector = smallest_eigenpair([[2.0, 0, 0], [0, -5.0, 0], [0, 0, 7.0]])
    >>> value
    -5.0
    >>> vector
    array([0., 1., 0.])

    """
    sym = _symmetrize(H)
    values, vectors = sla.eigh(sym, subset_by_index=[0, 0])
    vector = vectors[:, 0] / np.linalg.norm(vectors[:, 0])

    significant = np.flatnonzero(np.abs(vector) > EIGEN_SIGN_TOL)
    if significant.size and vector[significant[0]] < 0:
        vector = -vector

    return float(values[0]), vector + 0.0


def min_eigenvalue(H: ArrayLike) -> float:
    """Return the smallest eigenvalue of a symmetric matrix."""
    sym = _symmetrize(H)
    return float(sla.eigvalsh(sym, subset_by_index=[0, 0])[0])


@dataclass(frozen=True)
class ConstantsBundle:
    """The smoothness, curvature and geometry constants of one problem.

    Parameters
    ----------
    L0 : float
        Lipschitz constant of the loss.
    L1 : float
        Lipschitz constant of the gradient.
    L2 : float
        Lipschitz constant of the Hessian.
    lam : float
        Smallest population Hessian eigenvalue at the local minima.
    alpha : float
        Gradient threshold of the strict-saddle implication.
    beta : float, optional
        Floor of the radial boundary gradient, ``0 < beta < L1``.
    M : float
        Upper bound of the loss.
    D : float
        Diameter of the domain.
    K : int
        Number of population local minima.
    lambda_saddle : float, optional
        Curvature magnitude guaranteed where the gradient is below `alpha`.
        Defaults to `lam` when unset.
    grid_resolution : float, optional
        Spacing of the certification grid, if certified numerically.
    grid_size : int, optional
        Number of certification grid points, if certified numerically.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    L0: float
    L1: float
    L2: float
    lam: float
    alpha: float
    beta: float | None
    M: float
    D: float
    K: int = 1
    lambda_saddle: float | None = None
    grid_resolution: float | None = None
    grid_size: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        for item in fields(self):
            value = getattr(self, item.name)
            if value is None or item.name == "K":
                continue
            if not math.isfinite(value) or value < 0:
                emsg = (
                    f"Constant {item.name!r} must be finite and non-negative, "
                    f"got {value}."
                )
                raise InputError(emsg)

        for name in ("lam", "alpha", "M", "D"):
            if getattr(self, name) <= 0:
                emsg = f"Constant {name!r} must be positive, got {getattr(self, name)}."
                raise InputError(emsg)

        if int(self.K) != self.K or self.K < 1:
            emsg = f"Constant 'K' must be a positive integer, got {self.K}."
            raise InputError(emsg)

        if self.lam > self.L1:
            emsg = (
                f"Hessian floor lam={self.lam} cannot exceed the gradient Lipschitz "
                f"constant L1={self.L1}."
            )
            raise InputError(emsg)

        if self.beta is not None and not 0 < self.beta < self.L1:
            emsg = f"Require 0 < beta < L1={self.L1}, got beta={self.beta}."
            raise InputError(emsg)

        if self.lambda_saddle is not None and self.lambda_saddle <= 0:
            emsg = (
                "Constant 'lambda_saddle' must be positive, got "
                f"{self.lambda_saddle}."
            )
            raise InputError(emsg)

    @property
    def strict_saddle_lambda(self) -> float:
        """The curvature constant serving both the minima and the saddles."""
        if self.lambda_saddle is None:
            return self.lam
        return min(self.lam, self.lambda_saddle)

    def replace(self, **changes: Any) -> ConstantsBundle:
        """Return a validated copy with `changes` applied."""
        return replace(self, **changes)

    def to_dict(self) -> dict[str, float | int | None]:
        """Return the constants keyed by name."""
        return {item.name: getattr(self, item.name) for item in fields(self)}
