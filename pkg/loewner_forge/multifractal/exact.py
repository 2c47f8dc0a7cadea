"""
Exact SLE Spectrum
------------------
Closed-form integral-means spectrum of bounded whole-plane SLE:

.. math::

    \\beta(q) = \\begin{cases}
        \\frac{\\kappa}{2}\\gamma^2 - 2\\gamma - 1, & q \\le -1 - \\frac{3\\kappa}{8}, \\\\
        \\frac{\\kappa}{2}\\gamma^2, & -1 - \\frac{3\\kappa}{8} \\le q \\le \\frac{3(\\kappa + 4)^2}{32\\kappa}, \\\\
        q - \\frac{(\\kappa + 4)^2}{16\\kappa}, & q \\ge \\frac{3(\\kappa + 4)^2}{32\\kappa},
    \\end{cases}
    \\qquad
    \\gamma(q, \\kappa) = \\frac{\\kappa + 4 - \\sqrt{(\\kappa + 4)^2 - 8q\\kappa}}{2\\kappa}.

:math:`\\gamma` is the small root of :math:`\\kappa\\gamma^2 - (\\kappa + 4)\\gamma + 2q = 0`.
"""

import math
from typing import Tuple, Union

import numpy as np

from loewner_forge.core.errors import DomainError, ParameterError
from loewner_forge.multifractal.spectrum import SpectrumCurve

Scalar = Union[float, np.ndarray]


def _check_kappa(kappa: float) -> None:
    if not kappa > 0:
        raise ParameterError(f"kappa must be positive, got {kappa}.")


def sle_breakpoints(kappa: float) -> Tuple[float, float]:
    """The two branch points :math:`-1 - 3\\kappa/8` and :math:`3(\\kappa + 4)^2/(32\\kappa)`."""
    _check_kappa(kappa)
    return -1.0 - 3.0 * kappa / 8.0, 3.0 * (kappa + 4.0) ** 2 / (32.0 * kappa)


def root_limit(kappa: float) -> float:
    """Largest :math:`q` for which :math:`\\gamma(q, \\kappa)` is real."""
    _check_kappa(kappa)
    return (kappa + 4.0) ** 2 / (8.0 * kappa)


def sle_gamma(q: Scalar, kappa: float) -> Scalar:
    """
    :math:`\\gamma(q, \\kappa)`.

    :raises DomainError: If some ``q`` exceeds :py:func:`root_limit`.
    """
    q = np.asarray(q, dtype=np.float64)
    discriminant = (kappa + 4.0) ** 2 - 8.0 * q * kappa
    if np.any(discriminant < 0):
        raise DomainError(f"gamma is real only for q <= {root_limit(kappa)!r}.")
    gamma = (kappa + 4.0 - np.sqrt(discriminant)) / (2.0 * kappa)
    return float(gamma) if gamma.ndim == 0 else gamma


def beta_exact_sle(q: Scalar, kappa: float) -> Scalar:
    """
    :math:`\\beta(q)` of bounded whole-plane SLE\\ :sub:`κ`; beyond the upper branch point the
    linear branch is used directly, so every real ``q`` is accepted.
    """
    low, high = sle_breakpoints(kappa)
    q = np.asarray(q, dtype=np.float64)
    linear = q - (kappa + 4.0) ** 2 / (16.0 * kappa)
    # the linear branch covers the whole range where the root turns complex
    gamma = np.asarray(sle_gamma(np.minimum(q, high), kappa))
    middle = kappa * gamma**2 / 2.0
    beta = np.where(q >= high, linear, np.where(q <= low, middle - 2.0 * gamma - 1.0, middle))
    return float(beta) if beta.ndim == 0 else beta


def gamma_identity_check(q: Scalar, kappa: float) -> Scalar:
    """
    Residual :math:`|\\kappa\\gamma^2 - (\\kappa + 4)\\gamma + 2q|` of the quadratic defining :math:`\\gamma`.

    :raises DomainError: Outside the square-root domain.
    """
    gamma = np.asarray(sle_gamma(q, kappa))
    residual = np.abs(kappa * gamma**2 - (kappa + 4.0) * gamma + 2.0 * np.asarray(q, dtype=np.float64))
    return float(residual) if residual.ndim == 0 else residual


def branch_gaps(kappa: float) -> Tuple[float, float]:
    """
    Jumps of :math:`\\beta` across its two branch points, evaluating both neighbouring formulas
    at the branch point itself.
    """
    low, high = sle_breakpoints(kappa)
    gamma_low = sle_gamma(low, kappa)
    left = kappa * gamma_low**2 / 2.0 - 2.0 * gamma_low - 1.0
    right = kappa * gamma_low**2 / 2.0
    gamma_high = sle_gamma(high, kappa)
    middle = kappa * gamma_high**2 / 2.0
    linear = high - (kappa + 4.0) ** 2 / (16.0 * kappa)
    return abs(left - right), abs(middle - linear)


def exact_beta_curve(q: np.ndarray, kappa: float) -> SpectrumCurve:
    """The exact spectrum sampled on a grid."""
    q = np.asarray(q, dtype=np.float64)
    return SpectrumCurve(abscissa=q, values=np.atleast_1d(beta_exact_sle(q, kappa)), kind="beta")


def sle_dimension(kappa: float) -> float:
    """Hausdorff dimension :math:`\\min(1 + \\kappa/8, 2)` of the SLE trace."""
    _check_kappa(kappa)
    return min(1.0 + kappa / 8.0, 2.0)


def binomial_cascade_tau(p: float, q: Scalar) -> Scalar:
    """
    Mass exponents :math:`\\tau(q) = -\\log_2(p^q + (1 - p)^q)` of the binomial cascade on
    :math:`[0, 1]` with weights :math:`p, 1 - p`.

    :raises ParameterError: If ``p`` is not in :math:`(0, 1)`.
    """
    if not 0 < p < 1:
        raise ParameterError(f"Cascade weight must lie in (0, 1), got {p}.")
    q = np.asarray(q, dtype=np.float64)
    tau = -np.logaddexp(q * math.log(p), q * math.log1p(-p)) / math.log(2.0)
    return float(tau) if tau.ndim == 0 else tau
