"""
Hirota Sums
-----------
N-soliton tau functions in Hirota form,

.. math::

    \\tau_N = \\sum_{\\sigma \\in \\{0, 1\\}^N}
        \\exp\\Big(-\\sum_{l < l'} G_{ll'} \\sigma_l \\sigma_{l'} - \\sum_l \\sigma_l \\theta_l\\Big),

read as the grand partition function of a lattice gas with energy :math:`E(\\sigma)`.
Sums are evaluated in log-sum-exp form so that large phases never overflow.
"""

import logging
import math
from typing import Callable, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.special import logsumexp, softmax

from loewner_forge.core.errors import NumericError, ParameterError
from loewner_forge.tau_functions.potentials import kdv_kernel, kp_kernel
from loewner_forge.utils.devel import ComplexArray, RealArray

logger = logging.getLogger(__name__)

MAX_SOLITONS = 24
CHUNK_ENTRIES = 2**22


class SolitonData(BaseModel):
    """
    Momenta, phases and hierarchy times of an N-soliton solution.

    KdV times are :math:`(x, t_3, t_5, \\dots)`; KP times are :math:`(t_1, t_2, t_3, \\dots)`.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    momenta: ComplexArray
    """Positive distinct reals (KdV) or distinct points of the upper half plane (KP)."""
    phases: RealArray
    times: RealArray
    kind: Literal["kdv", "kp"] = "kdv"

    @model_validator(mode="after")
    def validate_data(self):
        k = self.momenta
        if k.ndim != 1 or self.phases.shape != k.shape:
            raise ValueError("Need one phase per momentum.")
        if len(k) > MAX_SOLITONS:
            raise ValueError(f"At most {MAX_SOLITONS} solitons are supported.")
        if len(np.unique(k)) != len(k):
            raise ValueError("Momenta must be distinct.")
        if self.kind == "kdv":
            if np.any(k.imag != 0) or np.any(k.real <= 0):
                raise ValueError("KdV momenta must be positive reals.")
            if len(self.times) == 0:
                raise ValueError("KdV times start with x.")
        elif np.any(k.imag <= 0):
            raise ValueError("KP momenta must lie in the open upper half plane.")
        return self

    @property
    def N(self) -> int:
        return len(self.momenta)

    @classmethod
    def kdv(cls, momenta, phases=None, x: float = 0.0, higher=(0.0,)) -> "SolitonData":
        """KdV data at position ``x`` and times ``higher`` = :math:`(t_3, t_5, \\dots)`."""
        momenta = np.asarray(momenta, dtype=np.float64)
        phases = np.zeros(len(momenta)) if phases is None else phases
        return cls(momenta=momenta, phases=phases, times=[x, *higher], kind="kdv")

    def kernel(self) -> np.ndarray:
        return kdv_kernel(self.momenta.real) if self.kind == "kdv" else kp_kernel(self.momenta)

    def phases_at(self, x=None, t3=None) -> np.ndarray:
        """
        KdV phases :math:`\\theta_l = -\\varphi_l - k_l x + k_l^3 t_3 + k_l^5 t_5 + \\dots`,
        with ``x`` and :math:`t_3` optionally replaced by broadcastable arrays.

        :return: Array of shape ``(N, *broadcast shape)``.
        """
        if self.kind != "kdv":
            raise ParameterError("Position-dependent phases are defined for KdV data.")
        k = self.momenta.real
        times = np.concatenate([self.times, np.zeros(max(0, 2 - len(self.times)))])
        x = times[0] if x is None else x
        t3 = times[1] if t3 is None else t3
        x, t3 = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(t3, dtype=np.float64))
        fixed = -self.phases + sum(k ** (2 * j + 1) * t for j, t in enumerate(times[2:], start=2))
        expand = (slice(None),) + (None,) * x.ndim
        return fixed[expand] - k[expand] * x[None] + k[expand] ** 3 * t3[None]

    def theta(self) -> np.ndarray:
        """Phases at the data's own times."""
        if self.kind == "kdv":
            return self.phases_at()
        z = self.momenta
        theta = self.phases.astype(np.float64)
        for order, t in enumerate(self.times, start=1):
            shape = 2 * (z**order).real if order % 2 else 2 * (z**order).imag
            theta = theta + shape * t
        return theta


def configurations(N: int) -> np.ndarray:
    """All :math:`2^N` occupation vectors as rows of a ``(2^N, N)`` 0/1 array."""
    return ((np.arange(2**N)[:, None] >> np.arange(N)[None, :]) & 1).astype(np.float64)


def lattice_gas_energy(sigma, G, theta) -> Tuple[float, int]:
    """
    :math:`E(\\sigma) = \\sum_{l < l'} G_{ll'} \\sigma_l \\sigma_{l'} + \\sum_l \\theta_l \\sigma_l`.

    :return: The energy and the particle number :math:`n = \\sum_l \\sigma_l`.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    if np.any((sigma != 0) & (sigma != 1)):
        raise ParameterError("Occupations must be 0 or 1.")
    G = np.asarray(G, dtype=np.float64)
    pair = 0.5 * (sigma @ (G - np.diag(np.diag(G))) @ sigma)
    return float(pair + np.asarray(theta, dtype=np.float64) @ sigma), int(sigma.sum())


def _log_partition(kernel: np.ndarray, theta: np.ndarray) -> np.ndarray:
    N = kernel.shape[0]
    flat = theta.reshape(N, -1)
    sigma = configurations(N)
    pair = 0.5 * np.einsum("si,ij,sj->s", sigma, kernel, sigma)
    chunk = max(1, CHUNK_ENTRIES // len(sigma))
    result = np.empty(flat.shape[1])
    for start in range(0, flat.shape[1], chunk):
        energy = pair[:, None] + sigma @ flat[:, start : start + chunk]
        result[start : start + chunk] = logsumexp(-energy, axis=0)
    return result.reshape(theta.shape[1:])


def log_tau(data: SolitonData) -> float:
    """:math:`\\log\\tau_N` at the data's times."""
    if data.N == 0:
        return 0.0
    return float(_log_partition(data.kernel(), data.theta()))


def tau_hirota(data: SolitonData) -> float:
    """
    :math:`\\tau_N`; positive for real KdV data.

    :raises NumericError: If the value overflows a double (use :py:func:`~.log_tau` instead).
    """
    value = log_tau(data)
    try:
        return math.exp(value)
    except OverflowError as exc:
        raise NumericError("Tau function overflows; use log_tau.", notes=[f"log tau = {value!r}"]) from exc


def kp_tau(data: SolitonData) -> float:
    """The KP tau function with the half-plane Coulomb kernel."""
    if data.kind != "kp":
        raise ParameterError("kp_tau needs KP data.")
    return tau_hirota(data)


def kdv_potential(data: SolitonData, x=None, t3=None) -> np.ndarray:
    """
    :math:`\\mathcal{V} = -2\\partial_x^2 \\log\\tau`.

    Since :math:`\\partial_x` of the exponent is :math:`\\sum_l k_l \\sigma_l`,
    the second derivative is the Boltzmann-weighted variance of that sum.
    """
    theta = data.phases_at(x, t3)
    if data.N == 0:
        return np.zeros(theta.shape[1:])
    N = data.N
    kernel = data.kernel()
    sigma = configurations(N)
    pair = 0.5 * np.einsum("si,ij,sj->s", sigma, kernel, sigma)
    slope = sigma @ data.momenta.real
    flat = theta.reshape(N, -1)
    chunk = max(1, CHUNK_ENTRIES // len(sigma))
    result = np.empty(flat.shape[1])
    for start in range(0, flat.shape[1], chunk):
        weights = softmax(-(pair[:, None] + sigma @ flat[:, start : start + chunk]), axis=0)
        mean = slope @ weights
        result[start : start + chunk] = -2.0 * np.sum(weights * (slope[:, None] - mean[None, :]) ** 2, axis=0)
    return result.reshape(theta.shape[1:])


Potential = Callable[[np.ndarray, np.ndarray], np.ndarray]


def finite_difference_kdv_residual(potential: Potential, x: np.ndarray, t: float, h: float, ht: float) -> float:
    """
    :math:`\\max |\\partial_t \\mathcal{V} + \\partial_x^3 \\mathcal{V} - 6 \\mathcal{V} \\partial_x \\mathcal{V}|`
    over the points ``x``, with second order central differences of spacing ``h`` in space
    and ``ht`` in time.
    """
    x = np.asarray(x, dtype=np.float64)
    offsets = h * np.arange(-2, 3)
    grid = x[:, None] + offsets[None, :]
    now = potential(grid, np.full_like(grid, t))
    later = potential(x, np.full_like(x, t + ht))
    earlier = potential(x, np.full_like(x, t - ht))
    v_t = (later - earlier) / (2 * ht)
    v_x = (now[:, 3] - now[:, 1]) / (2 * h)
    v_xxx = (now[:, 4] - 2 * now[:, 3] + 2 * now[:, 1] - now[:, 0]) / (2 * h**3)
    residual = np.abs(v_t + v_xxx - 6.0 * now[:, 2] * v_x)
    return float(np.max(residual)) if len(residual) else 0.0


def kdv_residual(
    data: SolitonData,
    h: float,
    ht: Optional[float] = None,
    x_range: Optional[Tuple[float, float]] = None,
) -> float:
    """
    KdV residual of :math:`\\mathcal{V} = -2\\partial_x^2\\log\\tau` on a uniform ``x`` grid of spacing ``h``.

    :param ht: Time spacing, ``h`` by default.
    :param x_range: Window of the check; by default it covers every soliton centre with a margin
        of ten widths.
    :raises ParameterError: If ``h`` does not resolve the narrowest soliton.
    """
    if data.kind != "kdv":
        raise ParameterError("kdv_residual needs KdV data.")
    k = data.momenta.real
    if data.N and not h < 0.1 / float(np.max(k)):
        raise ParameterError(f"Spacing {h} does not resolve momentum {float(np.max(k))}.")
    t3 = float(data.times[1]) if len(data.times) > 1 else 0.0
    if x_range is None:
        if data.N == 0:
            x_range = (-1.0, 1.0)
        else:
            centres = float(data.times[0]) + data.phases_at() / k
            margin = 10.0 / float(np.min(k))
            x_range = (float(np.min(centres)) - margin, float(np.max(centres)) + margin)
    x = np.arange(x_range[0], x_range[1], h)

    def potential(xs, ts):
        return kdv_potential(data, xs, ts)

    residual = finite_difference_kdv_residual(potential, x, t3, h, ht or h)
    logger.debug(f"KdV residual {residual:.3e} at spacing {h}")
    return residual
