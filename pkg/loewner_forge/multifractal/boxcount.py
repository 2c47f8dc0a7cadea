"""
Box Counting
------------
Mass exponents :math:`\\tau(q)` of a measure on lattice sites, defined by
:math:`\\sum_j p_j^q \\asymp l^{\\tau(q)}` over boxes of side :math:`l`.
For a DLA cluster the measure is the set of boundary charges.
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from loewner_forge.core.errors import ParameterError
from loewner_forge.growth.lattice import LatticeCluster
from loewner_forge.multifractal.spectrum import SpectrumCurve

logger = logging.getLogger(__name__)

MIN_SCALES = 3
RECOMMENDED_SCALES = 4
NORMALIZATION_TOLERANCE = 0.05
"""Allowed :math:`|\\tau(1)|` before a normalization warning."""


def dyadic_scales(radius: float) -> np.ndarray:
    """Box sides :math:`1, 2, 4, \\ldots` up to ``radius / 4``."""
    top = max(radius / 4.0, 1.0)
    return 2.0 ** np.arange(int(math.floor(math.log2(top))) + 1)


def partition_sums(sites: np.ndarray, weights: np.ndarray, q: np.ndarray, scale: float) -> np.ndarray:
    """
    :math:`\\sum_j p_j^q` over the boxes of side ``scale`` anchored at the lowest site coordinates.
    """
    boxes = np.floor((sites - sites.min(axis=0)) / scale).astype(np.int64)
    _, inverse = np.unique(boxes, axis=0, return_inverse=True)
    mass = np.bincount(inverse.ravel(), weights=weights)
    mass = mass[mass > 0]
    return np.array([np.sum(mass**value) for value in q])


def tau_from_measure(
    sites: np.ndarray, weights: np.ndarray, q_list: Sequence[float], scales: Sequence[float]
) -> SpectrumCurve:
    """
    Regress :math:`\\log\\sum_j p_j^q` on :math:`\\log l`.

    Weights need not be normalized: a constant factor only shifts the intercepts.
    Scales below the lattice spacing are dropped.

    :param sites: ``(k, 2)`` lattice coordinates.
    :param weights: Non-negative masses aligned with ``sites``; zero masses are ignored.
    :param q_list: Moment orders; sorted and deduplicated.
    :param scales: Box sides.
    :raises ParameterError: For negative or misaligned weights, an empty measure,
        or fewer than three usable scales.
    """
    sites = np.asarray(sites, dtype=np.float64).reshape(-1, 2)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (len(sites),):
        raise ParameterError("Weights must be aligned with sites.")
    if np.any(weights < 0):
        raise ParameterError("Measure weights must be non-negative.")
    support = weights > 0
    if not np.any(support):
        raise ParameterError("The measure is empty.")
    sites, weights = sites[support], weights[support]
    q = np.unique(np.asarray(q_list, dtype=np.float64))
    usable = np.unique(np.asarray(scales, dtype=np.float64))
    usable = usable[np.isfinite(usable) & (usable >= 1.0)]
    if len(usable) < MIN_SCALES:
        raise ParameterError(f"Box counting needs at least {MIN_SCALES} usable scales, got {len(usable)}.")
    if len(usable) < RECOMMENDED_SCALES:
        logger.warning(f"Only {len(usable)} box scales; at least {RECOMMENDED_SCALES} are recommended.")
    log_sums = np.log(np.stack([partition_sums(sites, weights, q, scale) for scale in usable]))
    fits = [stats.linregress(np.log(usable), log_sums[:, index]) for index in range(len(q))]
    tau = np.array([fit.slope for fit in fits])
    stderr = np.nan_to_num(np.array([fit.stderr for fit in fits]))
    logger.debug(f"tau on {len(usable)} scales between {usable[0]:g} and {usable[-1]:g}")
    return SpectrumCurve(
        abscissa=q,
        values=tau,
        stderr=stderr,
        kind="tau",
        scale_min=float(usable[0]),
        scale_max=float(usable[-1]),
    )


def tau_boxcount(
    cluster: LatticeCluster, q_list: Sequence[float], scales: Optional[Sequence[float]] = None
) -> SpectrumCurve:
    """
    Mass exponents of the boundary charges of a cluster.

    :math:`\\tau(1) = 0` holds for any probability measure; a larger deviation is reported as a
    warning and never corrected.

    :param scales: Box sides; by default the dyadic sides from 1 to a quarter of the cluster radius.
    :raises ParameterError: If the cluster carries no charges or too few scales are usable.
    """
    if len(cluster.charges) == 0:
        raise ParameterError("The cluster has no boundary charges; compute them with exact_charges first.")
    if scales is None:
        scales = dyadic_scales(cluster.radius)
    curve = tau_from_measure(cluster.boundary, cluster.charges, q_list, scales)
    if np.any(np.isclose(curve.abscissa, 1.0)):
        tau_one = float(curve.at(1.0))
        if abs(tau_one) > NORMALIZATION_TOLERANCE:
            logger.warning(f"tau(1) = {tau_one:.4f} deviates from 0; the charges may not be normalized.")
    return curve
