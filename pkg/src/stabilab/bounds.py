# Copyright (c) 2025, stabilab Contributors.
#
# This file is part of stabilab and is distributed under the 3-Clause BSD license.
# See the LICENSE file in the package root directory for licensing details.

"""Closed-form stability, generalization and excess risk bounds.

Every formula is evaluated as printed, term by term. Radii of the form
``lam / (c L2)`` are taken to be unbounded when ``L2 = 0``, so that every
``min{3D, 3 lam / (2 L2)}`` selects ``3D``, and the covering term of the
exponential failure probability is evaluated in log space.

The convex and local minima formulas use the Hessian floor ``lam`` of the
minima, while the non-convex formulas use
:attr:`~stabilab.core.ConstantsBundle.strict_saddle_lambda`, the curvature
constant serving both the minima and the saddles.

Notes
-----
.. versionadded:: 0.1.0

"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
import logging
import math
from typing import TYPE_CHECKING, Any, NamedTuple
import warnings

import lazy_loader as lazy

from .common import InputError, StrEnumPlus

if TYPE_CHECKING:
    import numpy as np

    from .core import ConstantsBundle

# lazy import third-party dependencies
np = lazy.load("numpy")

__all__ = [
    "BOUNDS",
    "UNDERFLOW_CUTOFF",
    "BoundReport",
    "ErrorBoundFactors",
    "IterationBound",
    "NonconvexValidity",
    "PgdRates",
    "TailKind",
    "Variant",
    "Xi2Rate",
    "XiTerms",
    "convex_excess_bound",
    "convex_stability_bound",
    "error_bound_factors",
    "evaluate",
    "gd_opt_bound",
    "good_event_prob_bound",
    "leading_constant",
    "local_minima_gen_bound",
    "nonconvex_excess_bound",
    "nonconvex_gen_bound",
    "nonconvex_validity",
    "pgd_admissible_limit",
    "pgd_corollary_excess_bound",
    "pgd_iteration_bound",
    "pgd_rates",
    "sgd_opt_bound",
    "sgd_uniform_stability_baseline",
    "subgaussian_tail_bound",
    "xi2_rate_constants",
    "xi_terms",
]

logger = logging.getLogger(__name__)

UNDERFLOW_CUTOFF: float = 1e-300
"""Exponential failure probabilities below this are reported as zero."""

LOG_UNDERFLOW_CUTOFF: float = math.log(UNDERFLOW_CUTOFF)
"""Natural logarithm of :data:`UNDERFLOW_CUTOFF`."""


class Variant(StrEnumPlus):
    """Enumeration of the non-convex bound variants.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    WITH_SPURIOUS = "with_spurious"
    NO_SPURIOUS = "no_spurious"


class TailKind(StrEnumPlus):
    """Enumeration of the sub-Gaussian tail bounds.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    GRADIENT_INNER = "gradient_inner"
    HESSIAN = "hessian"


@dataclass(frozen=True)
class BoundReport:
    """Evaluated right-hand side of a bound with its term breakdown.

    Parameters
    ----------
    name : str
        The bound identifier.
    inputs : dict
        The named inputs of the evaluation.
    terms : dict
        The named non-negative terms.
    total : float
        The sum of `terms`.
    probability : bool, default=False
        Whether the bound is a probability.
    notes : tuple of str, optional
        Free-form remarks, such as a degenerate covering or an underflow.

    Notes
    -----
    .. versionadded:: 0.1.0

    """

    name: str
    inputs: dict[str, float]
    terms: dict[str, float]
    total: float
    probability: bool = False
    notes: tuple[str, ...] = field(default=())

    @property
    def clamped(self) -> float:
        """The total clamped to ``[0, 1]`` for probabilities."""
        return min(self.total, 1.0) if self.probability else self.total

    def to_row(self) -> dict[str, Any]:
        """Flatten the report into one CSV row."""
        row: dict[str, Any] = {"bound": self.name, "total": self.total}
        if self.probability:
            row["clamped"] = self.clamped
        row.update({f"input_{key}": value for key, value in self.inputs.items()})
        row.update({f"term_{key}": value for key, value in self.terms.items()})
        if self.notes:
            row["notes"] = "; ".join(self.notes)
        return row


def _report(
    name: str,
    inputs: dict[str, float],
    terms: dict[str, float],
    *,
    probability: bool = False,
    notes: Iterable[str] = (),
) -> BoundReport:
    for key, value in terms.items():
        if not value >= 0:
            emsg = (
                f"Bound {name!r} produced a negative or undefined term "
                f"{key}={value!r}."
            )
            raise InputError(emsg)
    return BoundReport(
        name=name,
        inputs=inputs,
        terms=terms,
        total=math.fsum(terms.values()),
        probability=probability,
        notes=tuple(notes),
    )


def _check_n(n: float) -> None:
    if not n >= 1:
        emsg = f"Require a sample size n >= 1, got {n}."
        raise InputError(emsg)


def _check_d(d: int) -> None:
    if d < 2:
        emsg = (
            f"Require a dimension d >= 2 where log d appears, got d={d}; "
            "the matrix concentration constants degenerate for d = 1."
        )
        raise InputError(emsg)


def _check_nonnegative(**values: float) -> None:
    for key, value in values.items():
        if not value >= 0:
            emsg = f"Require a non-negative {key}, got {value}."
            raise InputError(emsg)


def _concentration(n: float, d: int) -> float:
    """Return ``(5 sqrt(log d) + 4 e log d / sqrt(n))^2``."""
    log_d = math.log(d)
    return (5 * math.sqrt(log_d) + 4 * math.e * log_d / math.sqrt(n)) ** 2


def _trap_radius(
    c: ConstantsBundle, lam: float, diameter: float | None = None
) -> float:
    """Return ``min{3D, 3 lam / (2 L2)}``."""
    D = c.D if diameter is None else diameter
    if c.L2 == 0:
        return 3 * D
    return min(3 * D, 3 * lam / (2 * c.L2))


def _safe_exp(value: float) -> float:
    try:
        return math.exp(value)
    except OverflowError:
        return math.inf


def convex_stability_bound(
    c: ConstantsBundle, n: float, d: int, eps_t: float
) -> BoundReport:
    """Evaluate the uniform stability bound of a proper algorithm on convex losses.

    .. math::

        \\frac{4\\sqrt{2} L_0 (\\lambda + 4 D L_2)}{\\lambda^{3/2}}\\sqrt{\\epsilon(t)}
        + \\frac{8 L_0}{n\\lambda}\\Big\\{L_0 + \\frac{64 L_0^2 L_2^2 D}{\\lambda^3}
        + \\frac{16 L_1^2 D}{\\lambda}\\Big(5\\sqrt{\\log d}
        + \\frac{4 e \\log d}{\\sqrt{n}}\\Big)^2\\Big\\}

    Parameters
    ----------
    c : ConstantsBundle
        The problem constants.
    n : float
        The sample size.
    d : int
        The parameter dimension, at least two.
    eps_t : float
        The optimization error ``E[R_S(w_t) - R_S(w*_S)]``.

    Returns
    -------
    BoundReport
        Terms ``sqrt_eps_term`` and ``one_over_n_term``.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    _check_n(n)
    _check_d(d)
    _check_nonnegative(eps_t=eps_t)

    L0, L1, L2, lam, D = c.L0, c.L1, c.L2, c.lam, c.D
    sqrt_eps = 4 * math.sqrt(2) * L0 * (lam + 4 * D * L2) / lam**1.5 * math.sqrt(eps_t)
    bracket = (
        L0
        + 64 * L0**2 * L2**2 * D / lam**3
        + 16 * L1**2 * D / lam * _concentration(n, d)
    )
    return _report(
        "convex_stability",
        {"n": n, "d": d, "eps_t": eps_t},
        {"sqrt_eps_term": sqrt_eps, "one_over_n_term": 8 * L0 / (n * lam) * bracket},
    )


def convex_excess_bound(
    c: ConstantsBundle, n: float, d: int, eps_t: float
) -> BoundReport:
    """Evaluate the excess risk bound of a proper algorithm on convex losses.

    This is ``eps_t`` plus :func:`convex_stability_bound`.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    stability = convex_stability_bound(c, n, d, eps_t)
    return _report(
        "convex_excess",
        stability.inputs,
        {"eps_term": eps_t, **stability.terms},
    )


def gd_opt_bound(c: ConstantsBundle, t: int) -> float:
    """Return the GD optimization error bound ``D^2 L1 / (2 t)``.

    Examples
    --------
    >>> from stabilab.core import ConstantsBundle
    >>> c = ConstantsBundle(L0=1, L1=1, L2=0, lam=1, alpha=1, beta=None, M=1, D=2)
    >>> gd_opt_bound(c, 10)
    0.2

    """
    if t < 1:
        emsg = f"Require at least one step, got t={t}."
        raise InputError(emsg)
    return c.D**2 * c.L1 / (2 * t)


def sgd_opt_bound(c: ConstantsBundle, t: int) -> float:
    """Return the SGD terminal iterate optimization error bound.

    This is ``D (L1^2 + 2 L0^2) / (2 L1 sqrt(t + 1)) (1 + log(t + 1))``.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if t < 0:
        emsg = f"Require a non-negative step, got t={t}."
        raise InputError(emsg)
    L0, L1 = c.L0, c.L1
    scale = c.D * (L1**2 + 2 * L0**2) / (2 * L1 * math.sqrt(t + 1))
    return scale * (1 + math.log(t + 1))


def _good_event_terms(
    c: ConstantsBundle, n: float, d: int, lam: float
) -> dict[str, float]:
    return {
        "hessian_lipschitz_term": 512 * c.L0**2 * c.L2**2 / (n * lam**4),
        "concentration_term": 128 * c.L1**2 / (n * lam**2) * _concentration(n, d),
    }


def good_event_prob_bound(c: ConstantsBundle, n: float, d: int) -> BoundReport:
    """Evaluate the failure probability of the local strong convexity event.

    .. math::

        \\frac{512 L_0^2 L_2^2}{n\\lambda^4} + \\frac{128 L_1^2}{n\\lambda^2}
        \\Big(5\\sqrt{\\log d} + \\frac{4 e \\log d}{\\sqrt{n}}\\Big)^2

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    _check_n(n)
    _check_d(d)
    return _report(
        "good_event_prob",
        {"n": n, "d": d},
        _good_event_terms(c, n, d, c.lam),
        probability=True,
    )


def local_minima_gen_bound(c: ConstantsBundle, n: float, d: int) -> BoundReport:
    """Evaluate the generalization bound on the empirical local minima.

    .. math::

        \\frac{8 L_0}{n\\lambda}\\Big[L_0 + \\Big\\{\\frac{64 L_0^2 L_2^2}{\\lambda^3}
        + \\frac{16 L_1^2}{\\lambda}\\Big(5\\sqrt{\\log d}
        + \\frac{4 e\\log d}{\\sqrt{n}}\\Big)^2\\Big\\}
        \\min\\Big\\{3D, \\frac{3\\lambda}{2 L_2}\\Big\\}\\Big]

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    _check_n(n)
    _check_d(d)

    L0, L1, L2, lam = c.L0, c.L1, c.L2, c.lam
    scale = 8 * L0 / (n * lam)
    radius = _trap_radius(c, lam)
    return _report(
        "local_minima_gen",
        {"n": n, "d": d, "trap_radius": radius},
        {
            "lipschitz_term": scale * L0,
            "hessian_lipschitz_term": scale * 64 * L0**2 * L2**2 / lam**3 * radius,
            "concentration_term": (
                scale * 16 * L1**2 / lam * _concentration(n, d) * radius
            ),
        },
    )


class XiTerms(NamedTuple):
    """The failure probabilities of the non-convex bounds."""

    xi1: float
    xi2: float
    r: float
    log_xi2: float
    degenerate: bool
    underflow: bool


def _covering_radius(c: ConstantsBundle, lam: float) -> float:
    r = c.alpha**2 / (16 * c.L0 * c.L1)
    if c.L2 > 0:
        r = min(lam / (8 * c.L2), r)
    return r


def xi_terms(
    c: ConstantsBundle, n: float, d: int, *, diameter: float | None = None
) -> XiTerms:
    """Evaluate the polynomial and exponential failure probabilities.

    The polynomial term is ``K`` times :func:`good_event_prob_bound`, and the
    exponential term is::

        2 (3D/r)^d exp(-n alpha^4 / (256 L0^4))
            + 4d (3D/r)^d exp(-n lam^2 / (256 L1^2))

    with ``r = min{lam / (8 L2), alpha^2 / (16 L0 L1)}``, evaluated in log
    space. A covering radius ``r >= 3D`` is degenerate and counts one ball.

    Parameters
    ----------
    c : ConstantsBundle
        The problem constants.
    n : float
        The sample size.
    d : int
        The parameter dimension, at least two.
    diameter : float, optional
        Override of the domain diameter ``D``.

    Returns
    -------
    XiTerms
        Both probabilities, the covering radius and diagnostics.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    _check_n(n)
    _check_d(d)

    if not (c.L0 > 0 and c.L1 > 0):
        emsg = f"Require positive L0 and L1, got L0={c.L0} and L1={c.L1}."
        raise InputError(emsg)

    lam = c.strict_saddle_lambda
    D = c.D if diameter is None else diameter
    xi1 = c.K * math.fsum(_good_event_terms(c, n, d, lam).values())

    r = _covering_radius(c, lam)
    degenerate = r >= 3 * D
    log_covering = 0.0 if degenerate else d * math.log(3 * D / r)
    log_xi2 = float(
        np.logaddexp(
            math.log(2) + log_covering - n * c.alpha**4 / (256 * c.L0**4),
            math.log(4 * d) + log_covering - n * lam**2 / (256 * c.L1**2),
        )
    )

    underflow = log_xi2 < LOG_UNDERFLOW_CUTOFF
    if underflow:
        xi2 = 0.0
        wmsg = (
            f"stabilab exponential failure probability underflows at n={n}, "
            f"d={d} (log value {log_xi2:.6g}), reporting zero."
        )
        warnings.warn(wmsg, stacklevel=2)
    else:
        xi2 = _safe_exp(log_xi2)

    return XiTerms(xi1, xi2, r, log_xi2, degenerate, underflow)


def _xi_notes(xi: XiTerms) -> list[str]:
    notes = []
    if xi.degenerate:
        notes.append("covering radius exceeds 3D, covering count set to 1")
    if xi.underflow:
        notes.append("xi2 underflow reported as 0")
    return notes


def nonconvex_gen_bound(
    c: ConstantsBundle,
    n: float,
    d: int,
    zeta_t: float,
    delta: float,
    variant: str | Variant = Variant.WITH_SPURIOUS,
    delta_prime: float = 0.0,
) -> BoundReport:
    """Evaluate the generalization bound of a proper algorithm on non-convex losses.

    With spurious empirical local minima::

        8 L0 zeta / lam + 2 L0 D delta + 2 K M / sqrt(n) + 8 K L0^2 / (n lam)
            + (L0 min{3D, 3 lam / (2 L2)} + 2M) xi1 + 2M xi2

    and without, holding with probability ``1 - delta_prime``::

        8 L0 zeta / lam + 2 L0 D delta + 6 M delta_prime + 8 (K + 4) L0^2 / (n lam)
            + ((K + 4) L0 / K min{3D, 3 lam / (2 L2)} + 6M) xi1 + 6M xi2

    Parameters
    ----------
    c : ConstantsBundle
        The problem constants.
    n : float
        The sample size.
    d : int
        The parameter dimension, at least two.
    zeta_t : float
        The gradient norm guarantee ``zeta(t)`` of the algorithm.
    delta : float
        The probability that ``zeta(t)`` fails.
    variant : str or Variant, default="with_spurious"
        The bound variant.
    delta_prime : float, default=0.0
        The probability of spurious empirical local minima.

    Returns
    -------
    BoundReport
        The term breakdown of the selected variant.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    _check_nonnegative(zeta_t=zeta_t, delta=delta, delta_prime=delta_prime)
    variant = Variant(variant)
    xi = xi_terms(c, n, d)

    L0, M, K, D = c.L0, c.M, c.K, c.D
    lam = c.strict_saddle_lambda
    radius = _trap_radius(c, lam)
    terms = {"zeta_term": 8 * L0 / lam * zeta_t, "delta_term": 2 * L0 * D * delta}

    if variant is Variant.WITH_SPURIOUS:
        terms |= {
            "sqrt_n_term": 2 * K * M / math.sqrt(n),
            "one_over_n_term": 8 * K * L0**2 / (n * lam),
            "xi1_term": (L0 * radius + 2 * M) * xi.xi1,
            "xi2_term": 2 * M * xi.xi2,
        }
    else:
        terms |= {
            "delta_prime_term": 6 * M * delta_prime,
            "one_over_n_term": 8 * (K + 4) * L0**2 / (n * lam),
            "xi1_term": ((K + 4) * L0 / K * radius + 6 * M) * xi.xi1,
            "xi2_term": 6 * M * xi.xi2,
        }

    return _report(
        f"nonconvex_gen_{variant}",
        {
            "n": n,
            "d": d,
            "zeta_t": zeta_t,
            "delta": delta,
            "delta_prime": delta_prime,
            "xi1": xi.xi1,
            "xi2": xi.xi2,
            "r": xi.r,
        },
        terms,
        notes=_xi_notes(xi),
    )


def nonconvex_excess_bound(
    c: ConstantsBundle,
    n: float,
    d: int,
    zeta_t: float,
    delta: float,
    variant: str | Variant = Variant.WITH_SPURIOUS,
    delta_prime: float = 0.0,
    opt_gap: float = 0.0,
) -> BoundReport:
    """Evaluate the excess risk bound of a proper algorithm on non-convex losses.

    With spurious empirical local minima the measured `opt_gap` between the
    local minimum nearest the output and the empirical global minimum is
    passed through::

        4 L0 zeta / lam + L0 D delta + 2 K M / sqrt(n) + 8 K L0^2 / (n lam)
            + (L0 min{3D, 3 lam / (2 L2)} + 2M) xi1 + 2M xi2 + opt_gap

    and without, `opt_gap` is not used::

        4 L0 zeta / lam + L0 D delta + 8 M delta_prime + 8 (K + 4) L0^2 / (n lam)
            + ((K + 4) L0 / K min{3D, 3 lam / (2 L2)} + 8M) xi1 + 8M xi2

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    _check_nonnegative(
        zeta_t=zeta_t, delta=delta, delta_prime=delta_prime, opt_gap=opt_gap
    )
    variant = Variant(variant)
    xi = xi_terms(c, n, d)

    L0, M, K, D = c.L0, c.M, c.K, c.D
    lam = c.strict_saddle_lambda
    radius = _trap_radius(c, lam)
    terms = {"zeta_term": 4 * L0 / lam * zeta_t, "delta_term": L0 * D * delta}
    notes = _xi_notes(xi)

    if variant is Variant.WITH_SPURIOUS:
        terms |= {
            "sqrt_n_term": 2 * K * M / math.sqrt(n),
            "one_over_n_term": 8 * K * L0**2 / (n * lam),
            "xi1_term": (L0 * radius + 2 * M) * xi.xi1,
            "xi2_term": 2 * M * xi.xi2,
            "opt_gap_term": opt_gap,
        }
    else:
        terms |= {
            "delta_prime_term": 8 * M * delta_prime,
            "one_over_n_term": 8 * (K + 4) * L0**2 / (n * lam),
            "xi1_term": ((K + 4) * L0 / K * radius + 8 * M) * xi.xi1,
            "xi2_term": 8 * M * xi.xi2,
        }
        if opt_gap:
            notes.append("opt_gap ignored without spurious local minima")

    return _report(
        f"nonconvex_excess_{variant}",
        {
            "n": n,
            "d": d,
            "zeta_t": zeta_t,
            "delta": delta,
            "delta_prime": delta_prime,
            "opt_gap": opt_gap,
            "xi1": xi.xi1,
            "xi2": xi.xi2,
            "r": xi.r,
        },
        terms,
        notes=notes,
    )


class IterationBound(NamedTuple):
    """Step count bounds of saddle-escaping PGD."""

    statement: float
    proof: float


def pgd_iteration_bound(c: ConstantsBundle, eps: float) -> IterationBound:
    """Return both step count bounds of saddle-escaping PGD.

    The stated bound is ``2M max{2 L1 / eps^2, 256 L2^2 / (9 eps)}`` and the
    bound its derivation concludes with is
    ``2M max{4 L1 / eps^2, 256 L2^2 / (9 eps)}``.

    Examples
    --------
    >>> from stabilab.core import ConstantsBundle
    >>> c = ConstantsBundle(L0=1, L1=1, L2=1, lam=1, alpha=1, beta=None, M=1, D=2)
    >>> bound = pgd_iteration_bound(c, 0.1)
    >>> round(bound.statement, 1), round(bound.proof, 1)
    (568.9, 800.0)

    """
    if not eps > 0:
        emsg = f"Require a positive epsilon, got {eps}."
        raise InputError(emsg)

    curvature = 256 * c.L2**2 / (9 * eps)
    return IterationBound(
        statement=2 * c.M * max(2 * c.L1 / eps**2, curvature),
        proof=2 * c.M * max(4 * c.L1 / eps**2, curvature),
    )


def subgaussian_tail_bound(
    c: ConstantsBundle,
    n: float,
    d: int,
    delta_dev: float,
    which: str | TailKind = TailKind.GRADIENT_INNER,
    *,
    clamp: bool = True,
) -> float:
    """Return a sub-Gaussian deviation tail bound.

    For ``which="gradient_inner"`` this bounds the probability that the
    sample mean of ``<grad f, grad R>`` deviates from ``||grad R||^2`` by
    `delta_dev`, ``2 exp(-n delta^2 / (16 L0^4))``. For ``which="hessian"``
    it bounds the spectral deviation of the sample mean Hessian,
    ``2d exp(-n delta^2 / (16 L1^2))``.

    Parameters
    ----------
    c : ConstantsBundle
        The problem constants.
    n : float
        The sample size, possibly zero.
    d : int
        The parameter dimension.
    delta_dev : float
        The positive deviation.
    which : str or TailKind, default="gradient_inner"
        The tail bound.
    clamp : bool, default=True
        Clamp the bound to ``[0, 1]``.

    Returns
    -------
    float
        The tail bound.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if not delta_dev > 0:
        emsg = f"Require a positive deviation, got {delta_dev}."
        raise InputError(emsg)

    which = TailKind(which)
    if which is TailKind.GRADIENT_INNER:
        prefactor, scale = 2.0, 16 * c.L0**4
    else:
        prefactor, scale = 2.0 * d, 16 * c.L1**2

    bound = 0.0 if scale == 0 else prefactor * math.exp(-n * delta_dev**2 / scale)
    return min(bound, 1.0) if clamp else bound


class PgdRates(NamedTuple):
    """Gradient and curvature guarantees of saddle-escaping PGD after ``t`` steps."""

    zeta: float
    rho: float


def pgd_rates(c: ConstantsBundle, t: int) -> PgdRates:
    """Return ``zeta(t) = max{2 sqrt(M L1 / t), 512 L2^2 / (9t)}`` and its cube root."""
    if t < 1:
        emsg = f"Require at least one step, got t={t}."
        raise InputError(emsg)
    zeta = max(2 * math.sqrt(c.M * c.L1 / t), 512 * c.L2**2 / (9 * t))
    return PgdRates(zeta, zeta ** (1 / 3))


def pgd_admissible_limit(c: ConstantsBundle) -> float:
    """Return the largest ``zeta(t)`` accepted by the PGD excess risk bound."""
    if c.beta is None:
        emsg = "The PGD excess risk bound requires a certified beta."
        raise InputError(emsg)
    lam, beta, L1, L2 = c.strict_saddle_lambda, c.beta, c.L1, c.L2
    limits = [beta / 2, c.alpha**2 / (2 * c.L0), lam**3 / 8]
    if L2 > 0:
        limits += [8 * beta**3 * L2**3 / (27 * L1**3), 27 / (64**3 * L2**3)]
    else:
        limits.append(0.0)
    return min(limits)


def pgd_corollary_excess_bound(
    c: ConstantsBundle, n: float, d: int, t: int, opt_gap: float = 0.0
) -> BoundReport:
    """Evaluate the excess risk bound of saddle-escaping PGD after `t` steps.

    The domain is the unit ball, so ``D = 2`` throughout::

        2 L0 / (lam sqrt(n)) + 4 L0 zeta(t) / lam + 2 K M / sqrt(n)
            + 8 K L0^2 / (n lam) + (L0 min{6, 3 lam / (2 L2)} + 2M) xi1
            + 2M xi2 + opt_gap

    The bound applies once ``zeta(t)`` is below :func:`pgd_admissible_limit`,
    which is recorded in the notes when it is not.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    _check_nonnegative(opt_gap=opt_gap)
    zeta, _ = pgd_rates(c, t)
    limit = pgd_admissible_limit(c)
    xi = xi_terms(c, n, d, diameter=2.0)

    L0, M, K = c.L0, c.M, c.K
    lam = c.strict_saddle_lambda
    radius = _trap_radius(c, lam, diameter=2.0)
    notes = _xi_notes(xi)
    if zeta > limit:
        notes.append(f"t={t} too small, zeta(t)={zeta:.6g} exceeds {limit:.6g}")

    return _report(
        "pgd_corollary_excess",
        {
            "n": n,
            "d": d,
            "t": t,
            "zeta_t": zeta,
            "limit": limit,
            "xi1": xi.xi1,
            "xi2": xi.xi2,
        },
        {
            "lambda_sqrt_n_term": 2 * L0 / (lam * math.sqrt(n)),
            "zeta_term": 4 * L0 / lam * zeta,
            "sqrt_n_term": 2 * K * M / math.sqrt(n),
            "one_over_n_term": 8 * K * L0**2 / (n * lam),
            "xi1_term": (L0 * radius + 2 * M) * xi.xi1,
            "xi2_term": 2 * M * xi.xi2,
            "opt_gap_term": opt_gap,
        },
        notes=notes,
    )


def sgd_uniform_stability_baseline(
    c: ConstantsBundle, n: float, step_sizes: Iterable[float]
) -> float:
    """Return the classical SGD stability bound ``2 L0^2 sum(eta_k) / n``.

    The bound grows with the number of steps, for comparison against
    :func:`convex_stability_bound`.
    """
    _check_n(n)
    return 2 * c.L0**2 * math.fsum(step_sizes) / n


def leading_constant(c: ConstantsBundle) -> float:
    """Return ``3200 L0 L1^2 D / lam^2``, the coefficient of ``log d / n``."""
    return 3200 * c.L0 * c.L1**2 * c.D / c.lam**2


class Xi2Rate(NamedTuple):
    """Exponential rate form of the covering failure probability."""

    c1: float
    c2: float
    bound: float
    applicable: bool


def xi2_rate_constants(c: ConstantsBundle, n: float, d: int) -> Xi2Rate:
    """Return the rate constants of the exponential failure probability.

    With ``c1 = 2 log(3D/r)`` and ``c2 = lam^2 / (512 L1^2 log(3D/r))`` the
    exponential failure probability is at most
    ``exp(-c1 n (c2 - d/n))`` once ``log(4d) <= d log(3D/r)``, which is
    reported as `applicable`.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    _check_n(n)
    _check_d(d)

    lam = c.strict_saddle_lambda
    r = _covering_radius(c, lam)
    if r >= 3 * c.D:
        emsg = f"Covering radius {r} exceeds 3D={3 * c.D}, no rate is defined."
        raise InputError(emsg)

    log_ratio = math.log(3 * c.D / r)
    c1 = 2 * log_ratio
    c2 = lam**2 / (512 * c.L1**2 * log_ratio)
    bound = _safe_exp(-c1 * n * (c2 - d / n))
    return Xi2Rate(c1, c2, bound, math.log(4 * d) <= d * log_ratio)


class NonconvexValidity(NamedTuple):
    """Whether measured PGD guarantees meet the non-convex theorem conditions."""

    zeta_ok: bool
    rho_ok: bool

    @property
    def valid(self) -> bool:
        """Whether both conditions hold."""
        return self.zeta_ok and self.rho_ok


def nonconvex_validity(
    c: ConstantsBundle, zeta_t: float, rho_t: float
) -> NonconvexValidity:
    """Check ``zeta(t) < alpha^2 / (2 L0)`` and ``rho(t) < lam / 2``."""
    return NonconvexValidity(
        zeta_ok=zeta_t < c.alpha**2 / (2 * c.L0),
        rho_ok=rho_t < c.strict_saddle_lambda / 2,
    )


class ErrorBoundFactors(NamedTuple):
    """Factors ``f`` of the landscape error bound ``||w - P(w)|| <= f ||grad||``."""

    proof: float
    statement: float


def error_bound_factors(c: ConstantsBundle) -> ErrorBoundFactors:
    """Return the derived factor ``2 / lam`` and the stated factor ``lam / 4``.

    The derived factor follows from ``lam / 2`` strong convexity near each
    empirical minimum and is the one asserted. The stated factor is reported
    alongside.

    Examples
    --------
    >>> from stabilab.core import ConstantsBundle
    >>> c = ConstantsBundle(L0=1, L1=1, L2=1, lam=0.5, alpha=1, beta=None, M=1, D=2)
    >>> error_bound_factors(c)
    ErrorBoundFactors(proof=4.0, statement=0.125)

    """
    lam = c.strict_saddle_lambda
    return ErrorBoundFactors(proof=2 / lam, statement=lam / 4)


def _scalar(name: str, fn: Callable[..., float]) -> Callable[..., BoundReport]:
    def evaluate_scalar(c: ConstantsBundle, **kwargs: Any) -> BoundReport:
        value = fn(c, **kwargs)
        return _report(name, {k: float(v) for k, v in kwargs.items()}, {name: value})

    return evaluate_scalar


def _iteration(c: ConstantsBundle, eps: float) -> BoundReport:
    bound = pgd_iteration_bound(c, eps)
    return BoundReport(
        name="pgd_iteration",
        inputs={"eps": eps, "statement": bound.statement},
        terms={"proof": bound.proof},
        total=bound.proof,
        notes=(f"statement form {bound.statement!r}",),
    )


def _tail(
    c: ConstantsBundle,
    n: float,
    d: int,
    delta_dev: float,
    which: str = TailKind.GRADIENT_INNER,
) -> BoundReport:
    raw = subgaussian_tail_bound(c, n, d, delta_dev, which, clamp=False)
    return _report(
        f"subgaussian_tail_{TailKind(which)}",
        {"n": n, "d": d, "delta_dev": delta_dev},
        {"tail": raw},
        probability=True,
    )


BOUNDS: dict[str, Callable[..., BoundReport]] = {
    "convex_stability": convex_stability_bound,
    "convex_excess": convex_excess_bound,
    "gd_opt": _scalar("gd_opt", gd_opt_bound),
    "sgd_opt": _scalar("sgd_opt", sgd_opt_bound),
    "good_event": good_event_prob_bound,
    "local_minima_gen": local_minima_gen_bound,
    "nonconvex_gen": nonconvex_gen_bound,
    "nonconvex_excess": nonconvex_excess_bound,
    "pgd_iteration": _iteration,
    "pgd_corollary": pgd_corollary_excess_bound,
    "subgaussian_tail": _tail,
}
"""Bound calculators returning a :class:`BoundReport`, keyed by name."""


def evaluate(name: str, c: ConstantsBundle, **kwargs: Any) -> BoundReport:
    """Evaluate a bound of :data:`BOUNDS` by name.

    Parameters
    ----------
    name : str
        A key of :data:`BOUNDS`.
    c : ConstantsBundle
        The problem constants.
    **kwargs : dict, optional
        The remaining arguments of the calculator.

    Returns
    -------
    BoundReport
        The evaluated bound.

    Notes
    -----
    .. versionadded:: 0.1.0

    """
    if name not in BOUNDS:
        options = ", ".join(f"{key!r}" for key in BOUNDS)
        emsg = f"Unknown bound {name!r}, expected one of {options}."
        raise InputError(emsg)

    try:
        report = BOUNDS[name](c, **kwargs)
    except TypeError as err:
        emsg = f"Invalid arguments for bound {name!r}: {err}."
        raise InputError(emsg) from err

    logger.debug("evaluated %s: %r", name, report.total)
    return report
