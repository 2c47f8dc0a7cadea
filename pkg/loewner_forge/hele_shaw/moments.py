"""
Moments
-------
Harmonic moments of Hele-Shaw domains and the quadrature identities they imply.

Exterior maps carry the moments :math:`I_k = \\int_{\\mathbb{C} \\setminus D} z^{-k} dA`,
computed through the contour form :math:`-\\frac{1}{2i}\\oint f^{-k} \\bar f(1/w) f'(w) dw`,
which also regularizes :math:`k = 1, 2`.
Interior maps carry :math:`M_k = \\int_D (z - z_1)^k dA` about the source :math:`z_1`.
Under the string equation both families are conserved for :math:`k \\geq 1`
while the area grows with the injected volume.
"""

import logging
import math
from pathlib import Path
from typing import Callable, List, Literal, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, model_validator

from loewner_forge.core.errors import DomainError, NumericError, ParameterError
from loewner_forge.hele_shaw.evolution import Trajectory
from loewner_forge.hele_shaw.laurent import LaurentMap, circle_points, map_area, winding_number
from loewner_forge.utils.devel import ComplexArray
from loewner_forge.utils.io import write_csv

logger = logging.getLogger(__name__)

QUADRATURE_TOLERANCE = 1e-8
DRIFT_FLOOR = 1e-9
START_POINTS = 256
MAX_POINTS = 2**16


class MomentVector(BaseModel):
    """
    Moments of one domain.

    ``moments[k - 1]`` holds :math:`I_k` (exterior) or :math:`M_k` (interior).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t_area: float
    """Area divided by :math:`\\pi`; it advances at the source rate."""
    moments: ComplexArray

    @property
    def area(self) -> float:
        return math.pi * self.t_area

    def __getitem__(self, k: int) -> complex:
        return complex(self.moments[k - 1])


def _contour_integral(integrand: Callable[[np.ndarray], np.ndarray], what: str) -> complex:
    """
    Trapezoid rule for :math:`\\oint_{|w|=1} g(w) dw`, doubling the points until two estimates
    agree to :math:`10^{-8}`.
    """
    previous = None
    n = START_POINTS
    while n <= MAX_POINTS:
        w = circle_points(n)
        value = complex(np.sum(integrand(w) * 1j * w) * 2 * math.pi / n)
        if previous is not None and abs(value - previous) <= QUADRATURE_TOLERANCE * max(1.0, abs(value)):
            return value
        previous, n = value, 2 * n
    raise NumericError(f"Contour quadrature for {what} did not converge.", notes=[f"points={n // 2}"])


def harmonic_moments(f: LaurentMap, M: int) -> MomentVector:
    """
    Exterior moments :math:`I_1, \\dots, I_M` of an exterior map.

    :raises ParameterError: If ``f`` is an interior map or ``M < 1``.
    :raises DomainError: If the origin is not inside the bounded domain.
    :raises NumericError: If the contour quadrature does not converge.
    """
    if f.orientation != "exterior":
        raise ParameterError("Exterior moments need an exterior map; use interior_moments.")
    if M < 1:
        raise ParameterError(f"Need at least one moment, got M={M}.")
    if winding_number(f, 0.0) != 1:
        raise DomainError("The origin must lie inside the bounded domain.")
    series = f.series()
    reflected = series.reflected()
    moments = [
        -_contour_integral(lambda w, k=k: series(w) ** (-k) * reflected(w) * series.derivative(w), f"I_{k}") / 2j
        for k in range(1, M + 1)
    ]
    return MomentVector(t_area=map_area(f) / math.pi, moments=np.array(moments))


def interior_moments(f: LaurentMap, M: int) -> MomentVector:
    """
    Moments :math:`M_1, \\dots, M_M` about the source :math:`z_1 = u_0` of an interior map.

    :raises ParameterError: If ``f`` is an exterior map or ``M < 1``.
    """
    if f.orientation != "interior":
        raise ParameterError("Interior moments need an interior map; use harmonic_moments.")
    if M < 1:
        raise ParameterError(f"Need at least one moment, got M={M}.")
    series = f.series()
    reflected = series.reflected()
    source = f.source
    moments = [
        _contour_integral(
            lambda w, k=k: (series(w) - source) ** k * reflected(w) * series.derivative(w), f"M_{k}"
        )
        / 2j
        for k in range(1, M + 1)
    ]
    return MomentVector(t_area=map_area(f) / math.pi, moments=np.array(moments))


def domain_moments(f: LaurentMap, M: int) -> MomentVector:
    """Conserved moments matching the map's orientation."""
    return harmonic_moments(f, M) if f.orientation == "exterior" else interior_moments(f, M)


def trajectory_moments(trajectory: Trajectory, M: int) -> List[MomentVector]:
    return [domain_moments(f, M) for f in trajectory.maps]


def richardson_invariance(trajectory: Trajectory, M: int) -> np.ndarray:
    """
    Largest drift of each moment along the trajectory.

    The drift is relative to :math:`|I_k(0)|` when that exceeds :math:`10^{-9}`
    and absolute otherwise, since vanishing moments stay at round-off level.

    :return: Array of length ``M``.
    """
    series = np.array([vector.moments for vector in trajectory_moments(trajectory, M)])
    initial = series[0]
    deviation = np.max(np.abs(series - initial), axis=0)
    scale = np.where(np.abs(initial) > DRIFT_FLOOR, np.abs(initial), 1.0)
    drift = deviation / scale
    logger.info(f"Largest moment drift over {len(series)} states: {float(np.max(drift)):.3e}")
    return drift


def moments_frame(trajectory: Trajectory, M: int) -> pd.DataFrame:
    """Long table with columns ``t, k, re, im``; ``k = 0`` rows hold the area."""
    rows = []
    for t, vector in zip(trajectory.times, trajectory_moments(trajectory, M)):
        rows.append({"t": t, "k": 0, "re": vector.area, "im": 0.0})
        rows.extend({"t": t, "k": k, "re": value.real, "im": value.imag} for k, value in enumerate(vector.moments, 1))
    return pd.DataFrame(rows, columns=["t", "k", "re", "im"])


def dump_moments_csv(trajectory: Trajectory, M: int, path: Union[str, Path]) -> Path:
    path = Path(path)
    write_csv(moments_frame(trajectory, M), path)
    return path


class HarmonicTestFunction(BaseModel):
    """
    :math:`\\varphi = \\Re h` or :math:`\\Im h` for :math:`h(z) = z^n`; ``constant`` is :math:`\\varphi = 1`.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["re_power", "im_power", "constant"] = "re_power"
    power: int = 1

    @model_validator(mode="after")
    def validate_function(self):
        if self.power < 0:
            raise ValueError("Test functions must be regular polynomials.")
        return self

    def __call__(self, z: np.ndarray) -> np.ndarray:
        if self.kind == "constant":
            return np.ones_like(np.real(z))
        value = np.asarray(z, dtype=np.complex128) ** self.power
        return value.real if self.kind == "re_power" else value.imag

    def analytic_derivative(self, order: int, z: complex) -> complex:
        """:math:`h^{(j)}(z)`."""
        if self.kind == "constant":
            return 1.0 + 0j if order == 0 else 0j
        if order > self.power:
            return 0j
        return math.factorial(self.power) / math.factorial(self.power - order) * complex(z) ** (self.power - order)

    def project(self, value: complex) -> float:
        return value.imag if self.kind == "im_power" else value.real


def quadrature_coefficients(f: LaurentMap) -> np.ndarray:
    """
    Coefficients :math:`Q_j = M_j / j!` with :math:`M_0` the area, for :math:`j` up to
    the polynomial degree minus one, so that
    :math:`\\int_D h \\, dA = \\sum_j Q_j h^{(j)}(z_1)` for every :math:`h` analytic in :math:`D`.
    """
    if f.orientation != "interior":
        raise ParameterError("Quadrature identities need an interior map.")
    degree = f.K + 1
    coefficients = [complex(map_area(f))]
    if degree > 1:
        coefficients.extend(interior_moments(f, degree - 1).moments)
    return np.array([value / math.factorial(j) for j, value in enumerate(coefficients)])


def domain_integral(f: LaurentMap, phi: Callable[[np.ndarray], np.ndarray], start: int = 16) -> float:
    """
    :math:`\\int_D \\varphi \\, dA` by two-dimensional quadrature in the unit disk:
    Gauss--Legendre in the radius and the trapezoid rule in the angle, weighted by :math:`|f'|^2`.
    Nodes are doubled until two estimates agree.
    """
    if f.orientation != "interior":
        raise ParameterError("Area quadrature is defined for interior maps.")
    previous = None
    n = start
    while n <= 1024:
        nodes, weights = np.polynomial.legendre.leggauss(n)
        rho, rho_weights = 0.5 * (nodes + 1.0), 0.5 * weights
        w = rho[:, None] * circle_points(2 * n + 2 * f.K + 4)[None, :]
        integrand = phi(f(w)) * np.abs(f.derivative(w)) ** 2 * rho[:, None]
        value = float(np.sum(rho_weights[:, None] * integrand) * 2 * math.pi / w.shape[1])
        if previous is not None and abs(value - previous) <= 1e-12 * max(1.0, abs(value)):
            return value
        previous, n = value, 2 * n
    raise NumericError("Area quadrature did not converge.")


def quadrature_check(
    f: LaurentMap, phi: HarmonicTestFunction, q_hat: Sequence[complex], z1: complex
) -> float:
    """
    :math:`|\\int_D \\varphi \\, dA - \\sum_j \\hat Q_j \\varphi_j(z_1)|` where :math:`\\varphi_j`
    is the matching part of :math:`h^{(j)}`.

    :param q_hat: Quadrature coefficients, e.g. ``[area]`` for a domain grown from a point.
    :param z1: Quadrature node.
    """
    direct = domain_integral(f, phi)
    predicted = sum(complex(q) * phi.analytic_derivative(j, z1) for j, q in enumerate(q_hat))
    return abs(direct - phi.project(predicted))
