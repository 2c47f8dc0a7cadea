"""
Legendre
--------
Discrete Legendre transforms between :math:`\\tau(q)`, :math:`f(\\alpha)` and :math:`\\beta(q)`:

.. math::

    f(\\alpha) = \\min_q\\,[q\\alpha - \\tau(q)], \\qquad \\tau(q) = \\min_\\alpha\\,[q\\alpha - f(\\alpha)],

    f(\\alpha) = \\inf_q\\,[q + \\alpha(\\beta(q) + 1 - q)], \\qquad
    \\beta(q) = \\sup_\\alpha\\,[q - 1 + (f(\\alpha) - q)/\\alpha].

Default dual grids are the secant slopes of the concave (for :math:`\\tau`) or convex (for :math:`\\beta`)
envelope of the input, which makes the transforms of piecewise-linear envelopes exact.
A non-concave :math:`\\tau` or non-convex :math:`\\beta` is replaced by its envelope; the result is
flagged with ``hull=True``. Dual points outside the slope range of the input have their extremum on
the grid edge; they are counted in ``edge_hits``.
"""

import logging
from typing import List, Optional

import numpy as np

from loewner_forge.core.errors import ParameterError
from loewner_forge.multifractal.spectrum import SpectrumCurve

logger = logging.getLogger(__name__)

SLOPE_RESOLUTION = 1e-12


def _cross(x: np.ndarray, y: np.ndarray, o: int, a: int, b: int) -> float:
    return (x[a] - x[o]) * (y[b] - y[o]) - (y[a] - y[o]) * (x[b] - x[o])


def upper_hull(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the vertices of the concave envelope of the points ``(x, y)``, ``x`` increasing."""
    hull: List[int] = []
    for index in range(len(x)):
        while len(hull) >= 2 and _cross(x, y, hull[-2], hull[-1], index) >= 0:
            hull.pop()
        hull.append(index)
    return np.asarray(hull, dtype=np.int64)


def lower_hull(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the vertices of the convex envelope."""
    return upper_hull(x, -y)


def _distinct(values: np.ndarray) -> np.ndarray:
    values = np.sort(values)
    if values.size < 2:
        return values
    keep = np.append(True, np.diff(values) > SLOPE_RESOLUTION * np.maximum(1.0, np.abs(values[1:])))
    return values[keep]


def _require(curve: SpectrumCurve, kind: str) -> None:
    if curve.kind != kind:
        raise ParameterError(f"Expected a {kind} curve, got {curve.kind!r}.")
    if len(curve) < 2:
        raise ParameterError("A Legendre transform needs at least two samples.")


def _count_edges(dual: np.ndarray, slopes: np.ndarray, name: str) -> int:
    low, high = float(np.min(slopes)), float(np.max(slopes))
    tol = SLOPE_RESOLUTION * max(1.0, abs(low), abs(high))
    hits = int(np.count_nonzero((dual < low - tol) | (dual > high + tol)))
    if hits:
        logger.warning(f"{hits} {name} values fall outside the input slope range; widen the grid.")
    return hits


def tau_to_f(curve: SpectrumCurve, alpha: Optional[np.ndarray] = None) -> SpectrumCurve:
    """
    :math:`f(\\alpha) = \\min_q[q\\alpha - \\tau(q)]`.

    :param alpha: Dual grid; defaults to the secant slopes of the concave envelope of :math:`\\tau`.
    :raises ParameterError: If ``curve`` is not a ``tau`` curve with at least two samples.
    """
    _require(curve, "tau")
    q, tau = curve.abscissa, curve.values
    hull = upper_hull(q, tau)
    slopes = np.diff(tau[hull]) / np.diff(q[hull])
    convexified = not curve.is_concave()
    if convexified:
        logger.warning("tau is not concave; transforming its concave envelope.")
    if alpha is None:
        alpha = _distinct(slopes)
        edge_hits = 0
    else:
        alpha = np.asarray(alpha, dtype=np.float64)
        edge_hits = _count_edges(alpha, slopes, "alpha")
    f = np.min(q[None, :] * alpha[:, None] - tau[None, :], axis=1)
    return SpectrumCurve(
        abscissa=alpha,
        values=f,
        kind="f",
        hull=convexified,
        edge_hits=edge_hits,
        scale_min=curve.scale_min,
        scale_max=curve.scale_max,
    )


def f_to_tau(curve: SpectrumCurve, q: np.ndarray) -> SpectrumCurve:
    """
    :math:`\\tau(q) = \\min_\\alpha[q\\alpha - f(\\alpha)]` on the grid ``q``.
    """
    if curve.kind != "f":
        raise ParameterError(f"Expected an f curve, got {curve.kind!r}.")
    q = np.asarray(q, dtype=np.float64)
    alpha, f = curve.abscissa, curve.values
    tau = np.min(q[:, None] * alpha[None, :] - f[None, :], axis=1)
    return SpectrumCurve(abscissa=q, values=tau, kind="tau", hull=curve.hull)


def legendre_tau_f_roundtrip(curve: SpectrumCurve) -> float:
    """
    Largest discrepancy between :math:`\\tau` and its double transform on the input grid.

    Zero up to rounding for concave inputs; for other inputs it is the distance to the concave
    envelope, and the envelope substitution is logged.
    """
    back = f_to_tau(tau_to_f(curve), curve.abscissa)
    discrepancy = float(np.max(np.abs(back.values - curve.values)))
    logger.debug(f"tau round trip discrepancy {discrepancy:.3g}")
    return discrepancy


def legendre_beta_to_f(curve: SpectrumCurve, alpha: Optional[np.ndarray] = None) -> SpectrumCurve:
    """
    :math:`f(\\alpha) = \\inf_q[q + \\alpha(\\beta(q) + 1 - q)]`.

    Writing :math:`s = 1 - 1/\\alpha`, :math:`f(\\alpha) = \\alpha(1 - \\beta^*(s))` with the convex
    conjugate :math:`\\beta^*(s) = \\max_q[sq - \\beta(q)]`; the default grid uses the envelope slopes
    :math:`s < 1`.

    :raises ParameterError: If ``curve`` is not a ``beta`` curve or an ``alpha`` value is not positive.
    """
    _require(curve, "beta")
    q, beta = curve.abscissa, curve.values
    hull = lower_hull(q, beta)
    slopes = np.diff(beta[hull]) / np.diff(q[hull])
    convexified = not curve.is_convex()
    if convexified:
        logger.warning("beta is not convex; transforming its convex envelope.")
    if alpha is None:
        s = _distinct(slopes[slopes < 1.0 - SLOPE_RESOLUTION])
        if len(s) == 0:
            raise ParameterError("Every slope of beta is at least 1; f is not defined on this grid.")
        alpha = 1.0 / (1.0 - s)
        edge_hits = 0
    else:
        alpha = np.asarray(alpha, dtype=np.float64)
        if np.any(alpha <= 0):
            raise ParameterError("alpha must be positive.")
        s = 1.0 - 1.0 / alpha
        edge_hits = _count_edges(s, slopes, "alpha")
    conjugate = np.max(s[:, None] * q[None, :] - beta[None, :], axis=1)
    f = alpha * (1.0 - conjugate)
    order = np.argsort(alpha)
    return SpectrumCurve(
        abscissa=alpha[order],
        values=f[order],
        kind="f",
        hull=convexified,
        edge_hits=edge_hits,
        scale_min=curve.scale_min,
        scale_max=curve.scale_max,
    )


def legendre_f_to_beta(curve: SpectrumCurve, q: np.ndarray) -> SpectrumCurve:
    """
    :math:`\\beta(q) = \\sup_\\alpha[q - 1 + (f(\\alpha) - q)/\\alpha]` on the grid ``q``.

    :raises ParameterError: If ``curve`` is not an ``f`` curve on positive :math:`\\alpha`.
    """
    if curve.kind != "f":
        raise ParameterError(f"Expected an f curve, got {curve.kind!r}.")
    alpha, f = curve.abscissa, curve.values
    if np.any(alpha <= 0):
        raise ParameterError("f curves must live on positive alpha.")
    q = np.asarray(q, dtype=np.float64)
    beta = np.max(q[:, None] - 1.0 + (f[None, :] - q[:, None]) / alpha[None, :], axis=1)
    return SpectrumCurve(abscissa=q, values=beta, kind="beta", hull=curve.hull)
