"""
Adler--Moser Polynomials
------------------------
Rational KdV tau functions :math:`p_l(x; t_3, \\dots, t_{2l-1})` built from
:math:`p_0 = 1`, :math:`p_1 = x` by the bilinear recurrence

.. math::

    p_{l+1}'' p_l - 2 p_{l+1}' p_l' + p_{l+1} p_l'' = 0.

Each step solves a linear system for the coefficients of :math:`p_{l+1}` in exact rational
arithmetic. The recurrence fixes :math:`p_{l+1}` only up to scale and one shift, so the
leading coefficient is normalized to one and the remaining freedom, attached to the lowest
monomial that the system leaves free, is the new parameter :math:`t_{2l+1}`.
With this normalization :math:`p_2 = x^3 + t_3` and
:math:`p_3 = x^6 + 5 t_3 x^3 + t_5 x - 5 t_3^2`.

:math:`\\mathcal{V} = -2\\partial_x^2 \\log p_l` solves KdV when :math:`t_3` is replaced by :math:`t_3 + 12t`.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, PlainSerializer, computed_field, model_validator
from typing_extensions import Annotated, TypeAlias

from loewner_forge.core.errors import ArtifactError, NumericError, ParameterError
from loewner_forge.tau_functions.hirota import finite_difference_kdv_residual

logger = logging.getLogger(__name__)

MAX_LEVEL = 12

Polynomial: TypeAlias = List[Fraction]
"""Exact coefficients in ascending powers of ``x``."""


def fraction_validator(value: Any) -> Fraction:
    """
    Coerce integers, strings, floats or ``[numerator, denominator]`` pairs into a fraction.
    """
    if isinstance(value, (list, tuple)):
        numerator, denominator = value
        return Fraction(int(numerator), int(denominator))
    return Fraction(value)


ExactRational = Annotated[
    Fraction,
    BeforeValidator(fraction_validator),
    PlainSerializer(lambda value: [value.numerator, value.denominator], return_type=list),
]
"""A fraction that dumps to JSON as a ``[numerator, denominator]`` pair."""


def poly_trim(a: Polynomial) -> Polynomial:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    size = max(len(a), len(b))
    return poly_trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(size)])


def poly_scale(a: Polynomial, factor) -> Polynomial:
    return poly_trim([factor * c for c in a])


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    result = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            result[i + j] += ai * bj
    return poly_trim(result)


def poly_derivative(a: Polynomial) -> Polynomial:
    if len(a) == 1:
        return [Fraction(0)]
    return [i * a[i] for i in range(1, len(a))]


def bilinear_residual(upper: Polynomial, lower: Polynomial) -> Polynomial:
    """:math:`q'' p - 2 q' p' + q p''` for ``q = upper`` and ``p = lower``."""
    dq, dp = poly_derivative(upper), poly_derivative(lower)
    terms = [
        poly_mul(poly_derivative(dq), lower),
        poly_scale(poly_mul(dq, dp), -2),
        poly_mul(upper, poly_derivative(dp)),
    ]
    total = [Fraction(0)]
    for term in terms:
        total = poly_add(total, term)
    return total


def _monomial(j: int) -> Polynomial:
    return [Fraction(0)] * j + [Fraction(1)]


def next_adler_moser(lower: Polynomial, level: int, parameter: Fraction) -> Polynomial:
    """
    Solve the recurrence for :math:`p_{l+1}` given :math:`p_l` (``level`` = :math:`l`).

    :raises NumericError: If the linear system is inconsistent or leaves more than one free coefficient.
    """
    degree = (level + 1) * (level + 2) // 2
    columns = list(range(degree - 1, -1, -1))
    images = [bilinear_residual(_monomial(j), lower) for j in columns]
    target = bilinear_residual(_monomial(degree), lower)
    rows = max(len(target), *(len(image) for image in images)) if images else len(target)

    def entry(poly: Polynomial, i: int) -> Fraction:
        return poly[i] if i < len(poly) else Fraction(0)

    matrix = [[entry(image, i) for image in images] + [-entry(target, i)] for i in range(rows)]
    pivots: List[int] = []
    row = 0
    for column in range(len(columns)):
        pivot = next((r for r in range(row, rows) if matrix[r][column] != 0), None)
        if pivot is None:
            continue
        matrix[row], matrix[pivot] = matrix[pivot], matrix[row]
        lead = matrix[row][column]
        matrix[row] = [value / lead for value in matrix[row]]
        for r in range(rows):
            if r != row and matrix[r][column] != 0:
                factor = matrix[r][column]
                matrix[r] = [a - factor * b for a, b in zip(matrix[r], matrix[row])]
        pivots.append(column)
        row += 1
    if any(all(value == 0 for value in matrix[r][:-1]) and matrix[r][-1] != 0 for r in range(row, rows)):
        raise NumericError(f"Recurrence system for level {level + 1} is inconsistent.")
    free = [column for column in range(len(columns)) if column not in pivots]
    if len(free) != 1:
        raise NumericError(
            f"Recurrence system for level {level + 1} has {len(free)} free coefficients, expected one."
        )
    solution = {free[0]: parameter}
    for r, column in enumerate(pivots):
        solution[column] = matrix[r][-1] - matrix[r][free[0]] * parameter
    coefficients = [Fraction(0)] * (degree + 1)
    coefficients[degree] = Fraction(1)
    for column, power in enumerate(columns):
        coefficients[power] = solution[column]
    return coefficients


class AdlerMoserPoly(BaseModel):
    """
    The polynomial :math:`p_l` with its free parameters :math:`t_3, \\dots, t_{2l-1}`.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    level: int
    params: Tuple[ExactRational, ...] = ()
    """:math:`t_3, t_5, \\dots, t_{2l-1}`."""
    coeffs: Tuple[ExactRational, ...]
    """Ascending powers of ``x``."""

    @model_validator(mode="after")
    def validate_poly(self):
        if self.level < 0:
            raise ValueError("Level must be non-negative.")
        if len(self.params) != max(0, self.level - 1):
            raise ValueError(f"p_{self.level} takes {max(0, self.level - 1)} parameters.")
        if len(self.coeffs) != self.degree + 1 or self.coeffs[-1] != 1:
            raise ValueError(f"p_{self.level} must be monic of degree {self.degree}.")
        return self

    @computed_field
    @property
    def degree(self) -> int:
        return self.level * (self.level + 1) // 2

    def exact(self, x: Union[int, Fraction]) -> Fraction:
        value = Fraction(0)
        for c in reversed(self.coeffs):
            value = value * x + c
        return value

    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.float_coeffs())

    def potential(self, x) -> np.ndarray:
        """:math:`-2\\partial_x^2 \\log p_l = -2 (p'' p - p'^2) / p^2`."""
        coeffs = self.float_coeffs()
        p = np.polynomial.polynomial.polyval(x, coeffs)
        dp = np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(coeffs))
        ddp = np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(coeffs, 2))
        return -2.0 * (ddp * p - dp**2) / p**2

    def dump_json(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(self.model_dump_json(indent=2))
        return path

    @classmethod
    def load_json(cls, path: Union[str, Path]) -> "AdlerMoserPoly":
        path = Path(path)
        if not path.is_file():
            raise ArtifactError(f"Polynomial file {path} does not exist.")
        return cls.model_validate_json(path.read_text())


@lru_cache(maxsize=256)
def _build(level: int, params: Tuple[Fraction, ...]) -> Tuple[Fraction, ...]:
    polys: List[Polynomial] = [[Fraction(1)], [Fraction(0), Fraction(1)]]
    for step in range(1, level):
        polys.append(next_adler_moser(polys[step], step, params[step - 1]))
    residual = bilinear_residual(polys[level], polys[level - 1]) if level >= 1 else [Fraction(0)]
    if any(residual):
        raise NumericError(f"Bilinear recurrence residual of p_{level} is not zero.")
    return tuple(polys[level])


def adler_moser(l: int, params: Sequence = ()) -> AdlerMoserPoly:
    """
    The Adler--Moser polynomial :math:`p_l`.

    :param params: :math:`t_3, \\dots, t_{2l-1}` as exact rationals (ints, fractions or strings).
    :raises ParameterError: If ``l`` is outside ``0..12`` or the parameter count is wrong.
    """
    if not 0 <= l <= MAX_LEVEL:
        raise ParameterError(f"Adler-Moser levels 0..{MAX_LEVEL} are supported, got {l}.")
    params = tuple(fraction_validator(t) for t in params)
    if len(params) != max(0, l - 1):
        raise ParameterError(f"p_{l} takes {max(0, l - 1)} parameters, got {len(params)}.")
    coeffs = _build(l, params)
    logger.debug(f"Built p_{l} of degree {len(coeffs) - 1}")
    return AdlerMoserPoly(level=l, params=params, coeffs=coeffs)


def am_potential(poly: AdlerMoserPoly, x, t: float = 0.0) -> np.ndarray:
    """Rational KdV potential of ``poly`` at KdV time ``t`` (:math:`t_3 \\to t_3 + 12 t`)."""
    if t == 0 or poly.level < 2:
        return poly.potential(x)
    shifted = (poly.params[0] + 12 * Fraction(t), *poly.params[1:])
    return adler_moser(poly.level, shifted).potential(x)


def am_kdv_residual(
    poly: AdlerMoserPoly, x: Sequence[float], h: float, ht: Optional[float] = None, t: float = 0.0
) -> float:
    """
    KdV residual of the rational potential at the points ``x``, which must avoid the zeros of :math:`p_l`.
    """

    def potential(xs, ts):
        return am_potential(poly, xs, float(np.ravel(ts)[0]))

    return finite_difference_kdv_residual(potential, np.asarray(x, dtype=np.float64), t, h, ht or h)
