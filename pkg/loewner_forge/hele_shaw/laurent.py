"""
Laurent Maps
------------
Truncated conformal maps of Hele-Shaw domains and the bracket that drives them.

Two orientations are supported:

- ``exterior``: :math:`f(w) = r w + \\sum_{k=0}^{K} u_k w^{-k}` maps :math:`|w| > 1` onto the
  complement of a bounded domain (growth driven from infinity);
- ``interior``: :math:`f(w) = u_0 + r w + \\sum_{k=2}^{K+1} u_k w^{k}` maps :math:`|w| < 1` onto a
  bounded domain grown from the point source :math:`z_1 = u_0`.

On the unit circle the Schwarz reflection :math:`\\bar f(1/w)` equals :math:`\\overline{f(w)}`,
which is what the Polubarinova--Kochina bracket :math:`\\{f, \\bar f\\}` is built from.
"""

import logging
import math
from typing import Literal, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.spatial import cKDTree

from loewner_forge.core.errors import ParameterError
from loewner_forge.utils.devel import ComplexArray, IntArray

logger = logging.getLogger(__name__)

Orientation = Literal["exterior", "interior"]

BOUNDARY_SAMPLES = 2048
"""Number of boundary samples used by the univalence and cusp checks."""


def circle_points(n_theta: int) -> np.ndarray:
    return np.exp(2j * math.pi * np.arange(n_theta) / n_theta)


class LaurentSeries(BaseModel):
    """
    A finite Laurent polynomial :math:`\\sum_j c_j w^{p_j}`.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    powers: IntArray
    coeffs: ComplexArray

    @model_validator(mode="after")
    def validate_series(self):
        if self.powers.shape != self.coeffs.shape or self.powers.ndim != 1:
            raise ValueError("Powers and coefficients must be one-dimensional arrays of equal length.")
        return self

    def __call__(self, w: Union[complex, np.ndarray]) -> np.ndarray:
        w = np.asarray(w, dtype=np.complex128)
        return np.sum(self.coeffs[:, None] * w.ravel()[None, :] ** self.powers[:, None], axis=0).reshape(w.shape)

    def derivative(self, w: Union[complex, np.ndarray]) -> np.ndarray:
        w = np.asarray(w, dtype=np.complex128)
        terms = (self.powers * self.coeffs)[:, None] * w.ravel()[None, :] ** (self.powers[:, None] - 1)
        return np.sum(terms, axis=0).reshape(w.shape)

    def reflected(self) -> "LaurentSeries":
        """The Schwarz reflection :math:`\\bar g(1/w)`."""
        return LaurentSeries(powers=-self.powers, coeffs=np.conj(self.coeffs))

    def scaled(self, factor: complex) -> "LaurentSeries":
        return LaurentSeries(powers=self.powers, coeffs=factor * self.coeffs)


def coefficient_powers(orientation: Orientation, K: int) -> np.ndarray:
    """Powers of :math:`w` multiplying the coefficients ``u`` of a map of truncation ``K``."""
    if orientation == "exterior":
        return -np.arange(K + 1)
    return np.concatenate([[0], np.arange(2, K + 2)])


class LaurentMap(BaseModel):
    """
    A truncated conformal map with positive conformal radius ``r``.

    ``coeffs`` lists :math:`u_0, \\dots, u_K` for exterior maps and :math:`u_0, u_2, \\dots, u_{K+1}`
    for interior maps.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    r: float
    """Conformal radius."""
    coeffs: ComplexArray
    orientation: Orientation = "exterior"

    @model_validator(mode="after")
    def validate_map(self):
        if not (math.isfinite(self.r) and self.r > 0):
            raise ValueError(f"Conformal radius must be positive, got {self.r!r}.")
        if self.coeffs.ndim != 1 or len(self.coeffs) == 0:
            raise ValueError("A map needs at least the coefficient u_0.")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("Map coefficients must be finite.")
        return self

    @property
    def K(self) -> int:
        """Truncation order."""
        return len(self.coeffs) - 1

    @property
    def powers(self) -> np.ndarray:
        return coefficient_powers(self.orientation, self.K)

    @property
    def source(self) -> complex:
        """:math:`u_0`: the source point of an interior map, the centring term of an exterior one."""
        return complex(self.coeffs[0])

    def series(self) -> LaurentSeries:
        return LaurentSeries(powers=np.concatenate([[1], self.powers]), coeffs=np.concatenate([[self.r], self.coeffs]))

    def __call__(self, w):
        return self.series()(w)

    def derivative(self, w):
        return self.series().derivative(w)

    def coefficient(self, power: int) -> complex:
        """Coefficient of :math:`w^{p}`, zero if absent."""
        if power == 1:
            return complex(self.r)
        matches = np.nonzero(self.powers == power)[0]
        return complex(self.coeffs[matches[0]]) if len(matches) else 0j

    def advanced(self, velocity: "MapVelocity", dt: float) -> "LaurentMap":
        """Explicit Euler update :math:`f + dt \\cdot \\dot f`."""
        return LaurentMap(
            r=self.r + dt * velocity.r_dot,
            coeffs=self.coeffs + dt * velocity.coeff_dots,
            orientation=self.orientation,
        )


class MapVelocity(BaseModel):
    """Time derivative of a :py:class:`~.LaurentMap`."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    r_dot: float
    coeff_dots: ComplexArray
    orientation: Orientation = "exterior"

    @classmethod
    def zero(cls, f: LaurentMap) -> "MapVelocity":
        return cls(r_dot=0.0, coeff_dots=np.zeros(len(f.coeffs), dtype=np.complex128), orientation=f.orientation)

    def series(self) -> LaurentSeries:
        powers = coefficient_powers(self.orientation, len(self.coeff_dots) - 1)
        return LaurentSeries(
            powers=np.concatenate([[1], powers]), coeffs=np.concatenate([[self.r_dot], self.coeff_dots])
        )

    def combined(self, other: "MapVelocity", weight: float = 0.5) -> "MapVelocity":
        """Weighted average ``(1 - weight) * self + weight * other``."""
        return MapVelocity(
            r_dot=(1 - weight) * self.r_dot + weight * other.r_dot,
            coeff_dots=(1 - weight) * self.coeff_dots + weight * other.coeff_dots,
            orientation=self.orientation,
        )


def exterior_map(r: float, coeffs: Sequence[complex] = (0.0,)) -> LaurentMap:
    return LaurentMap(r=r, coeffs=np.asarray(coeffs, dtype=np.complex128), orientation="exterior")


def interior_map(source: complex, r: float, coeffs: Sequence[complex] = ()) -> LaurentMap:
    """:math:`f(w) = z_1 + r w + \\sum_{k \\geq 2} u_k w^k` with ``coeffs`` = :math:`u_2, u_3, \\dots`."""
    return LaurentMap(
        r=r, coeffs=np.concatenate([[source], np.asarray(coeffs, dtype=np.complex128)]), orientation="interior"
    )


def _as_series(item) -> LaurentSeries:
    return item if isinstance(item, LaurentSeries) else item.series()


def _check_velocity(f: LaurentMap, f_dot: MapVelocity) -> None:
    if f_dot.orientation != f.orientation or len(f_dot.coeff_dots) != len(f.coeffs):
        raise ParameterError("Velocity and map must have the same orientation and truncation.")


def poisson_bracket(f, f_dot, g, g_dot, n_theta: int) -> np.ndarray:
    """
    Sample :math:`\\{f, g\\} = w f_w g_t - w g_w f_t` at :math:`w = e^{i\\theta_j}`.

    Maps and velocities may be given as :py:class:`~.LaurentMap` / :py:class:`~.MapVelocity`
    or as :py:class:`~.LaurentSeries`.

    :param n_theta: Number of equispaced samples; at least :math:`4(K + 1)`.
    :raises ParameterError: If the grid is too coarse for the series involved.
    """
    f, f_dot, g, g_dot = (_as_series(item) for item in (f, f_dot, g, g_dot))
    spread = max(int(np.max(np.abs(series.powers))) for series in (f, f_dot, g, g_dot))
    if n_theta < 4 * max(spread, 1):
        raise ParameterError(f"Bracket grid of {n_theta} points is too coarse for degree {spread}.")
    w = circle_points(n_theta)
    return w * f.derivative(w) * g_dot(w) - w * g.derivative(w) * f_dot(w)


def string_bracket(f: LaurentMap, f_dot: MapVelocity, n_theta: int) -> np.ndarray:
    """The Polubarinova--Kochina bracket :math:`\\{f, \\bar f\\}` on the unit circle."""
    _check_velocity(f, f_dot)
    series, velocity = f.series(), f_dot.series()
    return poisson_bracket(series, velocity, series.reflected(), velocity.reflected(), n_theta)


def default_grid(f: LaurentMap) -> int:
    return 8 * (f.K + 1) + 8


def pk_residual(f: LaurentMap, f_dot: MapVelocity, rate: float = 1.0, n_theta: int = 0) -> float:
    """
    :math:`\\max_\\theta |\\{f, \\bar f\\} - q|` for the source rate :math:`q` (1 for the string equation).
    """
    bracket = string_bracket(f, f_dot, n_theta or default_grid(f))
    return float(np.max(np.abs(bracket - rate)))


def map_area(f: LaurentMap) -> float:
    """
    Area of the bounded domain: :math:`\\pi(r^2 - \\sum k|u_k|^2)` for exterior maps,
    :math:`\\pi(r^2 + \\sum k|u_k|^2)` for interior maps.
    """
    powers = f.powers
    weights = np.abs(powers) * np.abs(f.coeffs) ** 2
    sign = -1.0 if f.orientation == "exterior" else 1.0
    return float(math.pi * (f.r**2 + sign * np.sum(weights)))


def boundary_points(f: LaurentMap, n_theta: int = BOUNDARY_SAMPLES) -> np.ndarray:
    return f(circle_points(n_theta))


def cusp_ratio(f: LaurentMap, n_theta: int = BOUNDARY_SAMPLES) -> float:
    """:math:`\\min_\\theta |f_w(e^{i\\theta})| / r`; it vanishes when the boundary develops a cusp."""
    return float(np.min(np.abs(f.derivative(circle_points(n_theta)))) / f.r)


def winding_number(f: LaurentMap, point: complex, n_theta: int = BOUNDARY_SAMPLES) -> int:
    """Winding number of the boundary curve around ``point``."""
    loop = boundary_points(f, n_theta) - point
    increments = np.angle(np.roll(loop, -1) / loop)
    return int(round(float(np.sum(increments)) / (2 * math.pi)))


def _segments_cross(a0, a1, b0, b1) -> np.ndarray:
    def cross(o, p, q):
        return (p - o).real * (q - o).imag - (p - o).imag * (q - o).real

    d1, d2 = cross(b0, b1, a0), cross(b0, b1, a1)
    d3, d4 = cross(a0, a1, b0), cross(a0, a1, b1)
    return (d1 * d2 < 0) & (d3 * d4 < 0)


def is_univalent(f: LaurentMap, n_theta: int = BOUNDARY_SAMPLES) -> bool:
    """
    Self-intersection test of the sampled boundary polygon.

    Candidate segment pairs come from a k-d tree query on the vertices; only those are tested exactly.
    """
    points = boundary_points(f, n_theta)
    following = np.roll(points, -1)
    reach = 2.0 * float(np.max(np.abs(following - points)))
    tree = cKDTree(np.column_stack([points.real, points.imag]))
    pairs = tree.query_pairs(reach, output_type="ndarray")
    if len(pairs) == 0:
        return True
    i, j = pairs[:, 0], pairs[:, 1]
    gap = np.abs(i - j)
    keep = (gap > 1) & (gap < n_theta - 1)
    i, j = i[keep], j[keep]
    return not bool(np.any(_segments_cross(points[i], following[i], points[j], following[j])))
