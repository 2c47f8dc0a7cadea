"""
Potentials
----------
Pair potentials ("phase shifts") of soliton lattice gases.

- KdV: :math:`G_{ll'} = -\\log\\frac{(k_l - k_{l'})^2}{(k_l + k_{l'})^2}`;
  for geometric momenta :math:`k_l = C e^{2\\hbar l}` it is translation invariant,
  :math:`G_{ll'} = U(l - l') = -2\\log\\tanh|\\hbar (l - l')|`.
- KP: :math:`G = -\\log\\frac{(z - z')(\\bar z - \\bar z')}{(z - \\bar z')(\\bar z - z')}`,
  the Coulomb potential of the upper half plane with a grounded real axis.
"""

import logging
import math
from typing import Tuple

import numpy as np

from loewner_forge.core.errors import DomainError, NumericError, SingularityError

logger = logging.getLogger(__name__)

TRANSLATION_TOLERANCE = 1e-12


def kdv_kernel(momenta: np.ndarray) -> np.ndarray:
    """
    Matrix of KdV phase shifts with a zero diagonal.

    :raises SingularityError: If two momenta coincide.
    """
    k = np.asarray(momenta, dtype=np.float64)
    difference = k[:, None] - k[None, :]
    np.fill_diagonal(difference, 1.0)
    if np.any(difference == 0):
        raise SingularityError("KdV momenta must be distinct.")
    kernel = -2.0 * np.log(np.abs(difference) / np.abs(k[:, None] + k[None, :]))
    np.fill_diagonal(kernel, 0.0)
    return kernel


def translation_potential(l: np.ndarray, hbar: float) -> np.ndarray:
    """:math:`U(l) = -2 \\log\\tanh|\\hbar l|`."""
    return -2.0 * np.log(np.tanh(np.abs(hbar * np.asarray(l, dtype=np.float64))))


def geometric_momenta(C: float, hbar: float, N: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Momenta :math:`k_l = C e^{2\\hbar l}`, :math:`l = 1, \\dots, N`, and the table :math:`U(d)` for
    :math:`d = 1, \\dots, N - 1`.

    The phase shifts computed from the momenta are checked against :math:`U(l - l')`.

    :raises DomainError: If ``C`` or ``hbar`` is not positive.
    :raises NumericError: If the translation-invariance check fails.
    """
    if not (C > 0 and hbar > 0):
        raise DomainError(f"Geometric momenta need C > 0 and hbar > 0, got C={C}, hbar={hbar}.")
    levels = np.arange(1, N + 1)
    momenta = C * np.exp(2.0 * hbar * levels)
    table = translation_potential(np.arange(1, N), hbar)
    if N > 1:
        kernel = kdv_kernel(momenta)
        offsets = np.abs(levels[:, None] - levels[None, :])
        mask = offsets > 0
        defect = float(np.max(np.abs(kernel[mask] - table[offsets[mask] - 1])))
        if defect > TRANSLATION_TOLERANCE:
            raise NumericError("Phase shifts are not translation invariant.", notes=[f"defect={defect!r}"])
    return momenta, table


def halfplane_potential(z: complex, z_prime: complex) -> float:
    """:math:`U(z, z') = -2\\log|z - z'| + 2\\log|\\bar z - z'|`."""
    distance = abs(z - z_prime)
    if distance == 0:
        raise SingularityError("Coincident points.")
    return -2.0 * math.log(distance) + 2.0 * math.log(abs(z.conjugate() - z_prime))


def kp_phase_shift(z: complex, z_prime: complex) -> float:
    """
    KP phase shift of two points of the open upper half plane, evaluated from the cross ratio.

    :raises DomainError: If a point is not in the upper half plane.
    :raises SingularityError: If the points coincide.
    """
    z, z_prime = complex(z), complex(z_prime)
    if not (z.imag > 0 and z_prime.imag > 0):
        raise DomainError("KP momenta must lie in the open upper half plane.")
    if z == z_prime:
        raise SingularityError("Coincident KP momenta.")
    numerator = (z - z_prime) * (z.conjugate() - z_prime.conjugate())
    ratio = numerator / ((z - z_prime.conjugate()) * (z.conjugate() - z_prime))
    return -math.log(ratio.real)


def kp_kernel(points: np.ndarray) -> np.ndarray:
    """Matrix of KP phase shifts with a zero diagonal."""
    z = np.asarray(points, dtype=np.complex128)
    near = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(near, 1.0)
    if np.any(near == 0):
        raise SingularityError("KP momenta must be distinct.")
    kernel = 2.0 * np.log(np.abs(z[:, None] - np.conj(z)[None, :]) / near)
    np.fill_diagonal(kernel, 0.0)
    return kernel
