"""
Gas State
---------
Configurations of the two-dimensional Coulomb gas at inverse temperature 2 and their energies.

The Coulomb kernel gives

.. math::

    E = -2\\sum_{i<j}\\log|z_i - z_j| + \\frac{1}{\\hbar}\\sum_i \\left(|z_i|^2 + V(z_i)\\right),
    \\qquad V(z) = \\sum_k t_k z^k + \\bar t_k \\bar z^k,

and the sampling density is :math:`e^{-E}`. The KP kernel replaces the pair term with the
phase shift of the upper half plane, :math:`2\\log(|z_i - \\bar z_j| / |z_i - z_j|)`.
Forbidden configurations (coincident points, points outside the sampling disk or,
for the KP kernel, off the upper half plane) have energy ``+inf``.
"""

import logging
import math
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from loewner_forge.core.errors import ParameterError
from loewner_forge.utils.devel import ComplexArray, complex_array_validator

logger = logging.getLogger(__name__)

GasKernel = Literal["coulomb", "kp"]

CACHE_TOLERANCE = 1e-8
"""Relative agreement required between a cached energy and a full recomputation."""
ADMISSIBILITY_BOUND = 0.5
"""The harmonic potential must stay below this fraction of :math:`|z|^2` on the sampling disk."""


def harmonic_potential(z: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """:math:`V(z) = 2\\Re\\sum_k t_k z^k` with ``coeffs[k - 1]`` holding :math:`t_k`."""
    z = np.asarray(z, dtype=np.complex128)
    total = np.zeros(z.shape, dtype=np.complex128)
    for power, t in enumerate(coeffs, start=1):
        if t != 0:
            total += t * z**power
    return 2.0 * total.real


def confinement(z: np.ndarray, hbar: float, coeffs: np.ndarray) -> np.ndarray:
    """One-body term :math:`(|z|^2 + V(z))/\\hbar` of every point."""
    z = np.asarray(z, dtype=np.complex128)
    return (np.abs(z) ** 2 + harmonic_potential(z, coeffs)) / hbar


def admissibility_margin(coeffs: Sequence[complex], sampling_radius: Optional[float]) -> float:
    """
    Upper bound of :math:`|V(z)|/|z|^2` over the sampling disk, ignoring the linear term
    (which only moves the centre of the droplet).

    Without a sampling radius any cubic or higher term makes the measure non-normalizable,
    and the margin is ``inf``.
    """
    margin = 0.0
    for power, t in enumerate(coeffs, start=1):
        if power < 2 or t == 0:
            continue
        if power > 2 and sampling_radius is None:
            return math.inf
        radius = 1.0 if sampling_radius is None else sampling_radius
        margin += 2.0 * abs(t) * radius ** (power - 2)
    return margin


def pair_row(z: np.ndarray, index: int, point: complex, kernel: GasKernel) -> float:
    """
    Interaction of a point placed at ``point`` with every particle except ``index``.

    :return: The summed pair energy, ``inf`` on a collision.
    """
    near = np.abs(point - z)
    near[index] = 1.0
    if np.min(near) == 0:
        return math.inf
    if kernel == "coulomb":
        return float(-2.0 * np.sum(np.log(near)))
    far = np.abs(point - np.conj(z))
    far[index] = 1.0
    return float(2.0 * np.sum(np.log(far / near)))


def forbidden(point: complex, kernel: GasKernel, sampling_radius: Optional[float]) -> bool:
    """Whether a single position is outside the state space."""
    if sampling_radius is not None and abs(point) > sampling_radius:
        return True
    return kernel == "kp" and not point.imag > 0


def total_energy(
    positions: np.ndarray,
    hbar: float,
    coeffs: np.ndarray,
    kernel: GasKernel = "coulomb",
    sampling_radius: Optional[float] = None,
) -> float:
    """
    Full :math:`O(N^2)` energy of a configuration.

    :return: The energy, or ``inf`` for a forbidden configuration.
    """
    z = np.asarray(positions, dtype=np.complex128)
    if any(forbidden(complex(point), kernel, sampling_radius) for point in z):
        return math.inf
    one_body = float(np.sum(confinement(z, hbar, coeffs)))
    if len(z) < 2:
        return one_body
    upper = np.triu_indices(len(z), k=1)
    near = np.abs(z[:, None] - z[None, :])[upper]
    if np.min(near) == 0:
        return math.inf
    if kernel == "coulomb":
        return float(-2.0 * np.sum(np.log(near))) + one_body
    far = np.abs(z[:, None] - np.conj(z)[None, :])[upper]
    return float(2.0 * np.sum(np.log(far / near))) + one_body


class GasState(BaseModel):
    """
    A configuration of :math:`N` charges together with the parameters of its energy.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    positions: ComplexArray
    """Particle positions :math:`z_1, \\dots, z_N`."""
    hbar: float = Field(gt=0)
    """Inverse confinement strength; each particle covers area :math:`\\pi\\hbar` of the droplet."""
    potential_coeffs: ComplexArray = Field(default_factory=lambda: np.zeros(0, dtype=np.complex128))
    """Harmonic couplings :math:`t_1, t_2, \\dots` (``potential_coeffs[k - 1]`` is :math:`t_k`)."""
    kernel: GasKernel = "coulomb"
    sampling_radius: Optional[float] = Field(default=None, gt=0)
    """Radius of the hard wall confining the sampler; ``None`` for the whole plane."""
    energy_cache: Optional[float] = None
    """Energy of :py:attr:`positions`; filled on construction when omitted."""

    @model_validator(mode="before")
    @classmethod
    def fill_energy_cache(cls, data):
        if not isinstance(data, dict) or data.get("energy_cache") is not None:
            return data
        hbar = data.get("hbar")
        if "positions" not in data or not isinstance(hbar, (int, float)) or not hbar > 0:
            return data
        data = dict(data)
        data["energy_cache"] = total_energy(
            complex_array_validator(data["positions"]),
            float(hbar),
            complex_array_validator(data.get("potential_coeffs", [])),
            data.get("kernel", "coulomb"),
            data.get("sampling_radius"),
        )
        return data

    @model_validator(mode="after")
    def validate_state(self):
        if self.positions.ndim != 1 or len(self.positions) == 0:
            raise ValueError("Positions must be a non-empty one-dimensional array.")
        if not (np.all(np.isfinite(self.positions)) and np.all(np.isfinite(self.potential_coeffs))):
            raise ValueError("Positions and couplings must be finite.")
        if admissibility_margin(self.potential_coeffs, self.sampling_radius) >= ADMISSIBILITY_BOUND:
            raise ValueError(
                f"Harmonic couplings do not satisfy |V| < {ADMISSIBILITY_BOUND}|z|^2 on the sampling disk; "
                "reduce the couplings or set a smaller sampling_radius."
            )
        expected = self.recompute()
        cached = self.energy_cache
        if math.isinf(expected) or cached is None or math.isinf(cached):
            if cached != expected:
                raise ValueError(f"Cached energy {cached} does not match the configuration energy {expected}.")
        elif abs(cached - expected) > CACHE_TOLERANCE * max(1.0, abs(expected)):
            raise ValueError(f"Cached energy {cached} does not match the configuration energy {expected}.")
        return self

    @property
    def N(self) -> int:
        return len(self.positions)

    def recompute(self) -> float:
        return total_energy(self.positions, self.hbar, self.potential_coeffs, self.kernel, self.sampling_radius)

    def with_positions(self, positions: np.ndarray, energy_cache: Optional[float] = None) -> "GasState":
        """The same gas at new positions; the energy is recomputed unless supplied."""
        return GasState(
            positions=positions,
            hbar=self.hbar,
            potential_coeffs=self.potential_coeffs,
            kernel=self.kernel,
            sampling_radius=self.sampling_radius,
            energy_cache=energy_cache,
        )


def energy(state: GasState) -> float:
    """
    Coulomb energy of a state, whatever kernel it samples with.

    :return: The energy; ``inf`` if two points coincide or a point is outside the sampling disk.
    """
    return total_energy(state.positions, state.hbar, state.potential_coeffs, "coulomb", state.sampling_radius)


def kp_energy(state: GasState) -> float:
    """
    Energy of the half-plane soliton gas: KP phase shifts between pairs plus the same one-body term.

    :raises ParameterError: If a point is not in the open upper half plane.
    """
    if np.any(state.positions.imag <= 0):
        raise ParameterError("The KP kernel needs every point in the open upper half plane.")
    return total_energy(state.positions, state.hbar, state.potential_coeffs, "kp", state.sampling_radius)


def initial_state(
    N: int,
    hbar: float,
    seed,
    potential_coeffs: Sequence[complex] = (),
    kernel: GasKernel = "coulomb",
    sampling_radius: Optional[float] = None,
) -> GasState:
    """
    A state with points spread uniformly over the disk of the predicted droplet radius
    (shifted into the upper half plane for the KP kernel).

    :param seed: :py:class:`~loewner_forge.drivers.RngSeed` of the placement.
    :raises ParameterError: If ``N < 1``.
    """
    if N < 1:
        raise ParameterError(f"At least one particle is required, got {N}.")
    rng = seed.generator(1)
    radius = math.sqrt(hbar * N)
    if sampling_radius is not None:
        radius = min(radius, 0.9 * sampling_radius)
    points = radius * np.sqrt(rng.uniform(size=N)) * np.exp(2j * math.pi * rng.uniform(size=N))
    if kernel == "kp":
        points = points.real + 1j * (np.abs(points.imag) + radius)
        if sampling_radius is not None and np.any(np.abs(points) > sampling_radius):
            raise ParameterError("The sampling disk is too small to hold a KP configuration.")
    return GasState(
        positions=points,
        hbar=hbar,
        potential_coeffs=np.asarray(potential_coeffs, dtype=np.complex128),
        kernel=kernel,
        sampling_radius=sampling_radius,
    )
