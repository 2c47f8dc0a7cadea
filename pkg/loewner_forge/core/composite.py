"""
Composite Map
-------------
Compositions of elementary slit maps and the Loewner-equation helpers built on them.

A :py:class:`~.CompositeMap` represents

.. math::

    F_n(w) = e^{\\text{log\\_scale}}\\, f_1 \\circ f_2 \\circ \\dots \\circ f_n (w),

so the most recent slit acts first. Evaluation is sequential, :math:`O(n)` per point;
the maps do not commute and there is no closed form for the composition.
"""

import logging
import math
from typing import Iterable, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from loewner_forge.core.errors import DomainError, NumericError, SingularityError, ParameterError
from loewner_forge.core.slit_map import (
    DOMAIN_TOLERANCE,
    ElementarySlitMap,
    Points,
    TWO_PI,
    apply_slit,
    as_points,
    check_slit_domain,
    slit_value_and_derivative,
)
from loewner_forge.utils.devel import RealArray

logger = logging.getLogger(__name__)

SINGULARITY_TOLERANCE = 1e-12
"""Minimal distance between a point and the driving point in :py:func:`~.loewner_rhs`."""


class CompositeMap(BaseModel):
    """
    Ordered sequence of slit maps with an additive log-scale.

    Slits are stored column-wise (``angles``, ``capacities``) so that long SLE maps
    with tens of thousands of slits stay cheap to build and to ship to worker processes.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    angles: RealArray = Field(default_factory=lambda: np.zeros(0))
    """Slit angles in :math:`[0, 2\\pi)`, slit 1 first."""
    capacities: RealArray = Field(default_factory=lambda: np.zeros(0))
    """Slit capacities, same order as ``angles``."""
    log_scale: float = 0.0
    """Additive log-scale; :math:`-T` for whole-plane rescaling, zero otherwise."""

    @field_validator("angles")
    @classmethod
    def normalize_angles(cls, value: np.ndarray) -> np.ndarray:
        if np.all(np.isfinite(value)) and np.any((value < 0) | (value >= TWO_PI)):
            return _frozen(np.mod(value, TWO_PI))
        return value

    @model_validator(mode="after")
    def validate_slits(self):
        if self.angles.shape != self.capacities.shape or self.angles.ndim != 1:
            raise ValueError("Slit angles and capacities must be one-dimensional arrays of equal length.")
        if not (np.all(np.isfinite(self.angles)) and np.all(np.isfinite(self.capacities))):
            raise ValueError("Slit angles and capacities must be finite.")
        if np.any(self.capacities < 0):
            raise ValueError("Slit capacities must be non-negative.")
        if not math.isfinite(self.log_scale):
            raise ValueError("log_scale must be finite.")
        return self

    @classmethod
    def from_slits(cls, slits: Iterable[ElementarySlitMap], log_scale: float = 0.0) -> "CompositeMap":
        """
        Build a composite map from elementary slits listed in application index order (slit 1 first).
        """
        slits = list(slits)
        return cls(
            angles=[slit.angle for slit in slits],
            capacities=[slit.capacity for slit in slits],
            log_scale=log_scale,
        )

    @property
    def slits(self) -> List[ElementarySlitMap]:
        return [
            ElementarySlitMap(angle=float(angle), capacity=float(capacity))
            for angle, capacity in zip(self.angles, self.capacities)
        ]

    def __len__(self) -> int:
        return int(self.angles.shape[0])

    @property
    def total_capacity(self) -> float:
        return float(np.sum(self.capacities))

    @property
    def leading_coefficient(self) -> float:
        """Predicted leading Laurent coefficient :math:`\\exp(\\sum \\delta t + \\text{log\\_scale})`."""
        return math.exp(self.total_capacity + self.log_scale)

    def append(self, angle: float, capacity: float) -> "CompositeMap":
        """
        Return a new map with one more slit, applied before all existing ones.
        """
        return CompositeMap(
            angles=np.append(self.angles, math.fmod(angle, TWO_PI) % TWO_PI),
            capacities=np.append(self.capacities, capacity),
            log_scale=self.log_scale,
        )

    def truncated(self, n: int) -> "CompositeMap":
        """Return the map made of the first ``n`` slits, keeping the log-scale."""
        return CompositeMap(angles=self.angles[:n], capacities=self.capacities[:n], log_scale=self.log_scale)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64)
    array.setflags(write=False)
    return array


def _scalar_or_array(result: np.ndarray) -> Union[complex, np.ndarray]:
    return result[()] if result.ndim == 0 else result


def eval_composite(F: CompositeMap, w: Points) -> Union[complex, np.ndarray]:
    """
    Evaluate :math:`F(w)`, applying slit :math:`n` first and slit 1 last, then the scale factor.

    :param F: Composite map.
    :param w: Point(s) with :math:`|w| \\geq 1`.
    :raises DomainError: If a point lies inside the unit disk.
    :raises NumericError: If evaluation produces non-finite values; the failing slit index is noted.
    """
    z = as_points(w)
    if np.any(np.abs(z) < 1.0 - DOMAIN_TOLERANCE):
        raise DomainError("Composite maps are defined for |w| >= 1.")
    if len(F) > 0:
        check_slit_domain(z, float(F.angles[-1]), float(F.capacities[-1]))
    for index in range(len(F) - 1, -1, -1):
        z = apply_slit(z, F.angles[index], F.capacities[index])
        if not np.all(np.isfinite(z)):
            raise NumericError("Composite map evaluation failed.").with_note(f"failing slit index: {index + 1}")
    return _scalar_or_array(z * math.exp(F.log_scale))


def eval_derivative(F: CompositeMap, w: Points) -> Union[complex, np.ndarray]:
    """
    Evaluate :math:`F'(w)` by the chain rule over the slit sequence.

    :param F: Composite map.
    :param w: Point(s) with :math:`|w| > 1` strictly.
    :raises DomainError: If a point lies on or inside the unit circle.
    :raises NumericError: If any chain-rule factor is not finite.
    """
    z = as_points(w)
    if np.any(np.abs(z) <= 1.0):
        raise DomainError("Derivatives are evaluated strictly outside the unit circle.")
    derivative = np.ones_like(z)
    for index in range(len(F) - 1, -1, -1):
        z, factor = slit_value_and_derivative(z, F.angles[index], F.capacities[index])
        derivative = derivative * factor
        if not np.all(np.isfinite(derivative)):
            raise NumericError("Non-finite derivative factor.").with_note(f"failing slit index: {index + 1}")
    return _scalar_or_array(derivative * math.exp(F.log_scale))


def eval_with_derivative(F: CompositeMap, w: Points):
    """
    Evaluate :math:`F(w)` and :math:`F'(w)` in a single pass.

    :return: Tuple ``(value, derivative)``.
    """
    z = as_points(w)
    if np.any(np.abs(z) <= 1.0):
        raise DomainError("Derivatives are evaluated strictly outside the unit circle.")
    derivative = np.ones_like(z)
    for index in range(len(F) - 1, -1, -1):
        z, factor = slit_value_and_derivative(z, F.angles[index], F.capacities[index])
        derivative = derivative * factor
    if not (np.all(np.isfinite(z)) and np.all(np.isfinite(derivative))):
        raise NumericError("Composite evaluation produced non-finite values.")
    scale = math.exp(F.log_scale)
    return _scalar_or_array(z * scale), _scalar_or_array(derivative * scale)


def whole_plane_rescale(F: CompositeMap, T: float) -> CompositeMap:
    """
    Represent :math:`e^{-T} F(w)`, the whole-plane normalization of a map grown for time :math:`T`.

    :param T: Burn-in time, non-negative.
    :raises ParameterError: If ``T`` is negative.
    """
    if T < 0:
        raise ParameterError(f"Whole-plane rescaling needs T >= 0, got {T}.")
    return F.model_copy(update={"log_scale": -float(T)})


def fit_leading_coefficient(F: CompositeMap, radius: float = 1e3, points: int = 64) -> complex:
    """
    Fit :math:`F(w) \\approx a w + b + c / w` on a large circle and return :math:`a`.

    :param radius: Radius of the sampling circle.
    :param points: Number of equispaced samples.
    """
    w = radius * np.exp(1j * TWO_PI * np.arange(points) / points)
    values = np.asarray(eval_composite(F, w))
    design = np.stack([w, np.ones_like(w), 1.0 / w], axis=1)
    coefficients, *_ = np.linalg.lstsq(design, values, rcond=None)
    return complex(coefficients[0])


def loewner_rhs(w: Points, driver_value: float) -> Union[complex, np.ndarray]:
    """
    Velocity factor :math:`w (w + e^{iL}) / (w - e^{iL})` of the radial Loewner equation
    :math:`\\partial_t F = w F'(w) \\frac{w + e^{iL}}{w - e^{iL}}`.

    :raises SingularityError: If a point is within :py:data:`~.SINGULARITY_TOLERANCE` of :math:`e^{iL}`.
    """
    points = as_points(w)
    driving_point = complex(math.cos(driver_value), math.sin(driver_value))
    gap = points - driving_point
    if np.any(np.abs(gap) < SINGULARITY_TOLERANCE):
        raise SingularityError(f"Loewner velocity is singular at w = e^(i {driver_value}).")
    return _scalar_or_array(points * (points + driving_point) / gap)


def loewner_residual(F: CompositeMap, driver_value: float, dt: float, w: Points) -> Union[complex, np.ndarray]:
    """
    Discrete residual of the Loewner equation for one piecewise-constant step:
    :math:`(F(w, t + dt) - F(w, t)) / dt - F'(w, t) \\cdot \\text{loewner\\_rhs}(w, L)`.
    Vanishes at first order in ``dt``.
    """
    advanced = F.append(driver_value, dt)
    value, derivative = eval_with_derivative(F, w)
    return (np.asarray(eval_composite(advanced, w)) - value) / dt - derivative * loewner_rhs(w, driver_value)


class InvertedMap(BaseModel):
    """
    Unbounded whole-plane variant :math:`w \\mapsto 1 / \\mathcal{F}(1/w)`, defined inside the unit disk.
    """

    model_config = ConfigDict(frozen=True)

    base: CompositeMap

    def __call__(self, w: Points) -> Union[complex, np.ndarray]:
        points = as_points(w)
        if np.any(np.abs(points) > 1.0 + DOMAIN_TOLERANCE) or np.any(points == 0):
            raise DomainError("The inverted map is evaluated in the punctured unit disk.")
        return _scalar_or_array(1.0 / np.asarray(eval_composite(self.base, 1.0 / points)))

    def derivative(self, w: Points) -> Union[complex, np.ndarray]:
        points = as_points(w)
        if np.any(np.abs(points) >= 1.0) or np.any(points == 0):
            raise DomainError("The inverted map derivative is evaluated strictly inside the unit disk.")
        value, derivative = eval_with_derivative(self.base, 1.0 / points)
        return _scalar_or_array(np.asarray(derivative) / (np.asarray(value) ** 2 * points**2))


def invert_unbounded(F: CompositeMap) -> InvertedMap:
    """
    Wrap a (bounded) whole-plane map into its unbounded counterpart.
    """
    return InvertedMap(base=F)


def identity_map(log_scale: Optional[float] = None) -> CompositeMap:
    """The empty composition, optionally scaled."""
    return CompositeMap(log_scale=0.0 if log_scale is None else log_scale)
