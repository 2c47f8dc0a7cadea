"""
Generator
---------
The linear operator whose eigenfunctions are the derivative moments of whole-plane LLE:

.. math::

    L = -\\hat\\eta + w\\frac{w + 1}{w - 1}\\partial_w + \\bar w\\frac{\\bar w + 1}{\\bar w - 1}\\partial_{\\bar w}
        - \\frac{q}{(w - 1)^2} - \\frac{q}{(\\bar w - 1)^2} + q,

    \\hat\\eta[f](r, \\phi) = -\\frac{\\kappa}{2}\\partial_\\phi^2 f
        + \\int_{-\\pi}^{\\pi} (f(r, \\phi) - f(r, \\phi + \\varphi))\\, d\\eta(\\varphi).

The operator is applied to the family :math:`\\rho = \\mathrm{Re}\\sum c\\, r^p e^{im\\phi}` whose derivatives
are known in closed form; :py:func:`~.eta_limit` evaluates :math:`\\hat\\eta` from its definition as the
small-time limit of the driver's transition kernel, as an independent check.
The eigenproblem :math:`L\\rho = \\pm q\\rho` itself is not solved here.
"""

import itertools
import logging
import math
from typing import Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from loewner_forge.core.errors import DomainError, SingularityError
from loewner_forge.drivers.path import DriverKind, JumpAtom

logger = logging.getLogger(__name__)

Points = Union[complex, np.ndarray]

SINGULAR_DISTANCE = 1e-9
"""Points closer than this to :math:`w = 1` are rejected."""
HERMITE_NODES = 32
MAX_JUMPS = 3
"""Jump counts kept in the compound-Poisson sum of :py:func:`~.eta_limit`."""


class GeneratorSpec(BaseModel):
    """
    Parameters of the generator.
    """

    model_config = ConfigDict(frozen=True)

    kappa: float = Field(ge=0)
    """Brownian diffusion coefficient."""
    levy_atoms: Tuple[JumpAtom, ...] = ()
    """Symmetric jump atoms ``(size, rate)``; each sign occurs at rate/2."""
    q: float
    sign: Literal["bounded", "unbounded"] = "bounded"
    """``bounded`` pairs with the eigenvalue :math:`+q`, ``unbounded`` with :math:`-q`."""

    @model_validator(mode="after")
    def validate_atoms(self):
        for size, rate in self.levy_atoms:
            if rate < 0 or not math.isfinite(size) or not math.isfinite(rate):
                raise ValueError(f"Invalid jump atom (size={size}, rate={rate}).")
        return self

    @classmethod
    def from_driver_kind(cls, kind: DriverKind, q: float, sign: str = "bounded") -> "GeneratorSpec":
        return cls(kappa=kind.kappa, levy_atoms=kind.atoms, q=q, sign=sign)

    @property
    def eigenvalue(self) -> float:
        return self.q if self.sign == "bounded" else -self.q

    @property
    def jump_rate(self) -> float:
        return float(sum(rate for _, rate in self.levy_atoms))


class TestFunction(BaseModel):
    """
    :math:`\\rho(w) = \\mathrm{Re}\\sum_k c_k r^{p_k} e^{i m_k \\phi}` with :math:`w = r e^{i\\phi}`.
    """

    __test__ = False
    model_config = ConfigDict(frozen=True)

    terms: Tuple[Tuple[float, float, int], ...] = Field(min_length=1)
    """Triples ``(c, p, m)``."""

    def _components(self, w: np.ndarray):
        r, phi = np.abs(w), np.angle(w)
        for c, p, m in self.terms:
            yield p, m, c * r**p * np.exp(1j * m * phi)

    def __call__(self, w: Points) -> np.ndarray:
        w = np.asarray(w, dtype=np.complex128)
        return sum((g for _, _, g in self._components(w)), np.zeros(w.shape, dtype=np.complex128)).real

    def wirtinger(self, w: Points) -> np.ndarray:
        """:math:`\\partial_w\\rho`; the :math:`\\bar w` derivative is its conjugate since :math:`\\rho` is real."""
        w = np.asarray(w, dtype=np.complex128)
        total = np.zeros(w.shape, dtype=np.complex128)
        for p, m, g in self._components(w):
            # g = c w^((p+m)/2) conj(w)^((p-m)/2); Re g contributes both derivatives of g
            total += ((p + m) / 2.0) * g / w + np.conj(((p - m) / 2.0) * g / np.conj(w))
        return total / 2.0

    def eta_symbol(self, spec: GeneratorSpec, w: Points) -> np.ndarray:
        w = np.asarray(w, dtype=np.complex128)
        total = np.zeros(w.shape, dtype=np.complex128)
        for _, m, g in self._components(w):
            total += _multiplier(spec, m) * g
        return total.real


def _multiplier(spec: GeneratorSpec, m: int) -> float:
    jumps = sum(rate * (1.0 - math.cos(m * size)) for size, rate in spec.levy_atoms)
    return spec.kappa / 2.0 * m**2 + jumps


def _check_points(w: Points) -> np.ndarray:
    w = np.asarray(w, dtype=np.complex128)
    if np.any(np.abs(w - 1.0) < SINGULAR_DISTANCE):
        raise SingularityError("The generator is singular at w = 1.")
    if np.any(w == 0):
        raise DomainError("The test family is not differentiable at w = 0.")
    return w


def polar_grid(radii, n_phi: int) -> np.ndarray:
    """Points :math:`r e^{i\\phi}` on ``n_phi`` equispaced angles per radius, avoiding :math:`\\phi = 0`."""
    phi = 2.0 * math.pi * (np.arange(n_phi) + 0.5) / n_phi
    return (np.asarray(radii, dtype=np.float64)[:, None] * np.exp(1j * phi)[None, :]).ravel()


def eta_hat(spec: GeneratorSpec, f: TestFunction, w: Points) -> np.ndarray:
    """
    :math:`\\hat\\eta\\rho` in closed form: every mode :math:`e^{im\\phi}` is multiplied by
    :math:`\\frac{\\kappa}{2}m^2 + \\sum \\lambda(1 - \\cos ms)`.
    """
    return f.eta_symbol(spec, w)


def apply_generator(spec: GeneratorSpec, f: TestFunction, w: Points) -> np.ndarray:
    """
    :math:`L[\\rho]` at the points ``w``.

    :raises SingularityError: At (or next to) the boundary singularity :math:`w = 1`.
    :raises DomainError: At :math:`w = 0`.
    """
    w = _check_points(w)
    drift = w * (w + 1.0) / (w - 1.0)
    transport = 2.0 * np.real(drift * f.wirtinger(w))
    potential = np.real(-spec.q / (w - 1.0) ** 2 - spec.q / (np.conj(w) - 1.0) ** 2) + spec.q
    return -eta_hat(spec, f, w) + transport + potential * f(w)


def eigen_residual(spec: GeneratorSpec, f: TestFunction, w: Points) -> np.ndarray:
    """:math:`L[\\rho] \\mp q\\rho`."""
    w = _check_points(w)
    return apply_generator(spec, f, w) - spec.eigenvalue * f(w)


def _jump_offsets(spec: GeneratorSpec, t: float):
    """Offsets and probabilities of the compound-Poisson part of the driver after time ``t``."""
    offsets, weights = [0.0], [math.exp(-spec.jump_rate * t)]
    if spec.jump_rate == 0:
        return np.array(offsets), np.array(weights)
    single = [(sign * size, rate / (2.0 * spec.jump_rate)) for size, rate in spec.levy_atoms for sign in (1, -1)]
    for count in range(1, MAX_JUMPS + 1):
        poisson = math.exp(-spec.jump_rate * t) * (spec.jump_rate * t) ** count / math.factorial(count)
        for combination in itertools.product(single, repeat=count):
            offsets.append(sum(step for step, _ in combination))
            weights.append(poisson * math.prod(p for _, p in combination))
    return np.array(offsets), np.array(weights)


def _transition_difference(spec: GeneratorSpec, f: TestFunction, w: np.ndarray, t: float) -> np.ndarray:
    nodes, node_weights = np.polynomial.hermite_e.hermegauss(HERMITE_NODES)
    node_weights = node_weights / math.sqrt(2.0 * math.pi)
    jumps, jump_weights = _jump_offsets(spec, t)
    shifts = (math.sqrt(spec.kappa * t) * nodes[:, None] + jumps[None, :]).ravel()
    probabilities = (node_weights[:, None] * jump_weights[None, :]).ravel()
    rotated = f(w[:, None] * np.exp(1j * shifts)[None, :])
    return (f(w) - rotated @ probabilities) / t


def eta_limit(spec: GeneratorSpec, f: TestFunction, w: Points, h: float = 1e-3) -> np.ndarray:
    """
    :math:`\\hat\\eta\\rho` from its definition
    :math:`\\lim_{t \\to 0} t^{-1}\\int(\\rho(w) - \\rho(e^{i\\varphi}w))P(\\varphi, t)\\,d\\varphi`.

    The Gaussian part of :math:`P` is integrated by Gauss--Hermite quadrature, the jump part by the
    compound-Poisson sum over at most :py:data:`MAX_JUMPS` jumps; the limit is Richardson-extrapolated
    from :math:`t = h, h/2, h/4`.
    """
    w = np.atleast_1d(np.asarray(w, dtype=np.complex128))
    d1, d2, d4 = (_transition_difference(spec, f, w, h / k) for k in (1, 2, 4))
    first, second = 2.0 * d2 - d1, 2.0 * d4 - d2
    return (4.0 * second - first) / 3.0
