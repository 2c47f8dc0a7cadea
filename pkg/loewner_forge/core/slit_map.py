"""
Elementary Slit Map
-------------------
The elementary radial "spike" map that every stochastic growth model composes.

For capacity :math:`t` the slit map at angle zero is

.. math::

    h(w, t) = \\frac{e^t (w + 1)(w + 1 + S)}{2 w} - 1, \\qquad
    S = (w + 1) \\sqrt{1 - \\frac{4 e^{-t} w}{(w + 1)^2}},

with the principal square root. It maps the exterior of the unit disk onto the exterior of the disk
with a radial slit attached at :math:`w = 1`, and behaves as :math:`e^t w` at infinity.
A slit at angle :math:`\\varphi` is the rotation :math:`e^{i\\varphi} h(e^{-i\\varphi} w, t)`.

Outside the closed disk the principal root is analytic. On the unit circle the radicand is a negative
real number on the arc away from the slit, where the root is fixed by requiring
:math:`\\operatorname{Im} S` to share the sign of :math:`\\operatorname{Im} w`.
"""

import logging
import math
from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from loewner_forge.core.errors import DomainError, NumericError, SingularityError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

ComplexPoint = complex
"""A point of the plane. Arrays of points are accepted wherever a single point is."""

Points = Union[complex, float, np.ndarray]

DOMAIN_TOLERANCE = 1e-9
"""Points with :math:`|w| < 1 - DOMAIN\\_TOLERANCE` are rejected."""
BASE_ANGLE_TOLERANCE = 1e-12
"""Angular exclusion zone around the slit base on the unit circle."""
CIRCLE_BAND = 1e-8
"""Width of the band around the unit circle where the circle branch rule is applied."""


class ElementarySlitMap(BaseModel):
    """
    A single radial slit: angle of attachment and Loewner capacity.
    """

    model_config = ConfigDict(frozen=True)

    angle: float
    """Attachment angle in radians, normalized into :math:`[0, 2\\pi)`."""
    capacity: float
    """Loewner capacity :math:`\\delta t`; zero gives the identity map."""

    @field_validator("angle")
    @classmethod
    def normalize_angle(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError(f"Slit angle must be finite, got {value!r}.")
        value = math.fmod(value, TWO_PI)
        if value < 0:
            value += TWO_PI
        return 0.0 if value >= TWO_PI else value

    @field_validator("capacity")
    @classmethod
    def validate_capacity(cls, value: float) -> float:
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"Slit capacity must be a finite non-negative number, got {value!r}.")
        return value


def as_points(w: Points) -> np.ndarray:
    """
    Convert a point or an array of points into a complex array, rejecting non-finite entries.

    :raises DomainError: If any point is NaN or infinite.
    """
    points = np.asarray(w, dtype=np.complex128)
    if not np.all(np.isfinite(points)):
        raise DomainError("Non-finite point passed to a map evaluation.")
    return points


def base_half_angle(capacity: float) -> float:
    """
    Half of the angular width of the circle arc that is folded onto the slit.

    :param capacity: Slit capacity.
    :return: Angle :math:`\\theta_0` with :math:`\\cos\\theta_0 = 2e^{-t} - 1`.
    """
    return math.acos(min(1.0, max(-1.0, 2.0 * math.exp(-capacity) - 1.0)))


def tip_distance(capacity: float) -> float:
    """
    Distance of the slit tip from the unit circle, :math:`h(1, t) - 1`.
    For small capacities it behaves as :math:`2\\sqrt{t}`.
    """
    return math.exp(capacity) * (2.0 + 2.0 * math.sqrt(-math.expm1(-capacity))) - 2.0


def _branch_root(u: np.ndarray, capacity: float) -> np.ndarray:
    """
    :math:`S(u)` for points already rotated to the slit frame.
    """
    shifted = u + 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        radicand = 1.0 - 4.0 * math.exp(-capacity) * u / shifted**2
        root = shifted * np.sqrt(radicand)
    on_circle = np.abs(np.abs(u) - 1.0) < CIRCLE_BAND
    on_cut = on_circle & (radicand.real < 0)
    if np.any(on_cut):
        flip = on_cut & (root.imag * u.imag < 0)
        root = np.where(flip, -root, root)
    # u = -1 is a fixed point of the map; S is multiplied by u + 1 = 0 there
    return np.where(shifted == 0, 0.0, root)


def _check_domain(u: np.ndarray, capacity: float) -> None:
    modulus = np.abs(u)
    if np.any(modulus < 1.0 - DOMAIN_TOLERANCE):
        raise DomainError(f"Slit maps are defined for |w| >= 1, got min |w| = {modulus.min():.3e}.")
    if capacity > 0:
        on_circle = np.abs(modulus - 1.0) < BASE_ANGLE_TOLERANCE
        if np.any(on_circle):
            base = base_half_angle(capacity)
            distance = np.abs(np.abs(np.angle(u[on_circle])) - base)
            if np.any(distance < BASE_ANGLE_TOLERANCE):
                raise SingularityError("Evaluation at the base of a slit.")


def check_slit_domain(z: np.ndarray, angle: float, capacity: float) -> None:
    """
    Raise unless every point may be fed to the slit map at ``angle``.

    :raises DomainError: If a point lies inside the unit disk.
    :raises SingularityError: If a point is the base of the slit.
    """
    _check_domain(z * complex(math.cos(angle), -math.sin(angle)), capacity)


def apply_slit(z: np.ndarray, angle: float, capacity: float) -> np.ndarray:
    """
    Apply a slit map to an array of points without validation.
    This is the inner kernel of composite evaluation.
    """
    if capacity == 0:
        return z
    rotation = complex(math.cos(angle), math.sin(angle))
    u = z * rotation.conjugate()
    root = _branch_root(u, capacity)
    value = math.exp(capacity) * (u + 1.0) * (u + 1.0 + root) / (2.0 * u) - 1.0
    return rotation * value


def slit_value_and_derivative(z: np.ndarray, angle: float, capacity: float):
    """
    Value and derivative of a slit map in one pass, without validation.
    """
    if capacity == 0:
        return z, np.ones_like(z)
    rotation = complex(math.cos(angle), math.sin(angle))
    u = z * rotation.conjugate()
    shifted = u + 1.0
    root = _branch_root(u, capacity)
    scale = math.exp(capacity)
    numerator = shifted**2 + shifted * root
    numerator_prime = 2.0 * shifted + root + shifted * (shifted - 2.0 / scale) / root
    value = scale * numerator / (2.0 * u) - 1.0
    derivative = scale * (numerator_prime * u - numerator) / (2.0 * u**2)
    return rotation * value, derivative


def slit_derivative(z: np.ndarray, angle: float, capacity: float) -> np.ndarray:
    """
    Derivative of a slit map at an array of points without validation.
    """
    return slit_value_and_derivative(z, angle, capacity)[1]


def eval_elementary(slit: ElementarySlitMap, w: Points) -> Union[complex, np.ndarray]:
    """
    Evaluate :math:`f(w) = e^{i\\varphi} h(e^{-i\\varphi} w, \\delta t)`.

    :param slit: The slit map.
    :param w: A point or an array of points with :math:`|w| \\geq 1`.
    :return: Image point(s), of the same shape as ``w``.
    :raises DomainError: If a point lies inside the unit disk or is not finite.
    :raises SingularityError: If a point is the base of the slit.
    :raises NumericError: If the branch evaluation produces non-finite values.
    """
    points = as_points(w)
    check_slit_domain(points, slit.angle, slit.capacity)
    result = apply_slit(points, slit.angle, slit.capacity)
    if not np.all(np.isfinite(result)):
        raise NumericError("Slit map evaluation produced non-finite values.")
    return result[()] if result.ndim == 0 else result


def elementary_derivative(slit: ElementarySlitMap, w: Points) -> Union[complex, np.ndarray]:
    """
    Derivative of :py:func:`~.eval_elementary` with respect to ``w``.

    :raises DomainError: If :math:`|w| \\leq 1`; the derivative diverges at the slit base.
    """
    points = as_points(w)
    if np.any(np.abs(points) <= 1.0):
        raise DomainError("Slit map derivatives are evaluated strictly outside the unit circle.")
    result = slit_derivative(points, slit.angle, slit.capacity)
    if not np.all(np.isfinite(result)):
        raise NumericError("Slit map derivative is not finite.")
    return result[()] if result.ndim == 0 else result
