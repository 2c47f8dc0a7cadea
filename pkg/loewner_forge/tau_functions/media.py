"""
Media
-----
Permeability :math:`\\kappa` and porosity :math:`\\eta` of integrable elliptic growth problems.

- Coxeter configurations: :math:`\\kappa = |z^l - \\bar z^l|^{-2m_1} |z^l + \\bar z^l|^{-2m_2}`, :math:`\\eta = 1`;
  moduli keep :math:`\\kappa` positive on every chamber.
- The non-Coxeter locus :math:`x^m((2m + 1)y^2 - x^2)`: :math:`\\kappa = x^{-2m}((2m+1)y^2 - x^2)^{-2}`.
- Stratified media from Adler--Moser polynomials: :math:`\\kappa\\eta = \\xi^{-2}` with
  :math:`\\xi = p_n / p_{n-1}` and :math:`\\eta = p_{n-1} S(x)` for a caller-supplied polynomial :math:`S`.
"""

import logging
import math
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np

from loewner_forge.core.errors import DomainError, ParameterError, SingularityError
from loewner_forge.tau_functions.adler_moser import adler_moser

logger = logging.getLogger(__name__)

SINGULAR_PROXIMITY = 1e-6


def singular_distance(l: int, m1: int, m2: int, z: complex) -> float:
    """
    Distance from ``z`` to the singular lines of a Coxeter weight:
    :math:`\\Im z^l = 0` (when :math:`m_1 > 0`) and :math:`\\Re z^l = 0` (when :math:`m_2 > 0`).
    """
    angles = []
    if m1 > 0:
        angles.extend(k * math.pi / l for k in range(l))
    if m2 > 0:
        angles.extend((k + 0.5) * math.pi / l for k in range(l))
    if not angles:
        return math.inf
    return min(abs((complex(z) * complex(math.cos(-a), math.sin(-a))).imag) for a in angles)


def coxeter_weight(l: int, m1: int, m2: int, z: complex) -> Tuple[float, float]:
    """
    :math:`(\\kappa, \\eta)` of the Coxeter configuration with :math:`l` (or :math:`2l`) mirrors.

    :raises ParameterError: If ``l < 1`` or a multiplicity is negative.
    :raises SingularityError: On the singular locus itself.
    """
    if l < 1 or m1 < 0 or m2 < 0:
        raise ParameterError(f"Need l >= 1 and non-negative multiplicities, got l={l}, m1={m1}, m2={m2}.")
    z = complex(z)
    distance = singular_distance(l, m1, m2, z)
    power = z**l
    odd, even = abs(power - power.conjugate()), abs(power + power.conjugate())
    if (m1 > 0 and odd == 0) or (m2 > 0 and even == 0):
        raise SingularityError(f"Point {z} lies on the singular locus.")
    if distance < SINGULAR_PROXIMITY:
        logger.warning(f"Point {z} is within {distance:.3g} of a singular line; kappa is ill-conditioned.")
    kappa = odd ** (-2 * m1) * even ** (-2 * m2)
    return kappa, 1.0


def non_coxeter_weight(m: int, z: complex) -> Tuple[float, float]:
    """:math:`(\\kappa, \\eta)` for the locus :math:`x^m((2m + 1)y^2 - x^2) = 0`."""
    if m < 1:
        raise ParameterError(f"Need m >= 1, got {m}.")
    x, y = complex(z).real, complex(z).imag
    cone = (2 * m + 1) * y**2 - x**2
    if x == 0 or cone == 0:
        raise SingularityError(f"Point {z} lies on the singular locus.")
    return abs(x) ** (-2 * m) * cone ** (-2), 1.0


def stratified_weight(n: int, params: Sequence, S: Sequence, x: float) -> Tuple[float, float]:
    """
    :math:`(\\kappa, \\eta)` of the stratified medium built from :math:`p_n` and :math:`p_{n-1}`.

    :param params: :math:`t_3, \\dots, t_{2n-1}` for :math:`p_n`; :math:`p_{n-1}` uses the leading ones.
    :param S: Coefficients of the porosity factor :math:`S(x)` in ascending powers, exact or float.
    :raises DomainError: If :math:`\\xi` vanishes or the porosity is not positive at ``x``.
    """
    if n < 1:
        raise ParameterError(f"Need n >= 1, got {n}.")
    upper = adler_moser(n, params)
    lower = adler_moser(n - 1, tuple(params)[: max(0, n - 2)])
    p_upper, p_lower = float(upper(x)), float(lower(x))
    porosity = p_lower * float(np.polynomial.polynomial.polyval(x, [float(Fraction(c)) for c in S]))
    if p_upper == 0 or p_lower == 0:
        raise DomainError(f"x={x} is a zero of p_{n} or p_{n - 1}.")
    if not porosity > 0:
        raise DomainError(f"Porosity {porosity} at x={x} is not positive.")
    xi = p_upper / p_lower
    return xi**-2 / porosity, porosity
