"""
Hastings--Levitov
-----------------
The HL(:math:`\\alpha`) family of iterated conformal maps.

At step :math:`n` a slit is attached at a uniform angle :math:`\\varphi_n` with capacity

.. math::

    \\delta t_n = \\delta a \\, |F'_{n-1}(e^{\\varepsilon_d + i\\varphi_n})|^{-\\alpha},

so that the attached particle has roughly constant physical size :math:`\\delta a` for
:math:`\\alpha = 2` (the DLA-like case) and constant capacity for :math:`\\alpha = 0`.
The derivative diverges on the unit circle at earlier slit bases, so it is evaluated at radius
:math:`1 + \\varepsilon_d` with :math:`\\varepsilon_d` the square root of the previous capacity.
"""

import logging
import math
from typing import Optional

import numpy as np

from loewner_forge.core.composite import CompositeMap, eval_derivative
from loewner_forge.core.errors import NumericError, ParameterError
from loewner_forge.drivers.path import DriverKind, DriverPath
from loewner_forge.drivers.sampling import sample_uniform_angles
from loewner_forge.drivers.seed import RngSeed
from loewner_forge.growth.run import GrowthRun

logger = logging.getLogger(__name__)


def _run(angles: np.ndarray, capacities: np.ndarray, params: dict, seed: RngSeed) -> GrowthRun:
    driver = DriverPath(
        breakpoints=np.arange(len(angles), dtype=np.float64), values=angles, kind=DriverKind(name="uniform_iid")
    )
    return GrowthRun(
        map=CompositeMap(angles=angles, capacities=capacities), driver=driver, params=params, seed=seed
    )


def grow_hl(
    alpha: float,
    delta_a: float,
    n: int,
    seed: RngSeed,
    regularization: Optional[float] = None,
) -> GrowthRun:
    """
    Grow an HL(:math:`\\alpha`) map of ``n`` slits.

    :param alpha: Exponent of the derivative; 0, 1 and 2 are the usual choices.
    :param delta_a: Target particle size, positive.
    :param n: Number of particles.
    :param seed: RNG stream for the attachment angles.
    :param regularization: Fixed radius offset :math:`\\varepsilon_d`;
        by default the square root of the previous capacity (:math:`\\sqrt{\\delta a}` at the first step).
    :raises ParameterError: If ``n < 1`` or ``delta_a <= 0``.
    :raises NumericError: If a capacity is not finite and positive; ``partial`` holds the run so far.
    """
    if n < 1:
        raise ParameterError(f"HL growth needs n >= 1, got {n}.")
    if not (delta_a > 0 and math.isfinite(delta_a)):
        raise ParameterError(f"HL growth needs delta_a > 0, got {delta_a}.")
    params = {"model": "hl", "alpha": float(alpha), "delta_a": float(delta_a), "n": int(n)}
    angles = sample_uniform_angles(n, seed).values
    capacities = np.zeros(n)
    previous = delta_a
    current = CompositeMap()
    for step in range(n):
        if alpha == 0 or step == 0:
            capacity = delta_a
        else:
            eps = math.sqrt(previous) if regularization is None else regularization
            try:
                derivative = abs(complex(eval_derivative(current, (1.0 + eps) * np.exp(1j * angles[step]))))
                capacity = delta_a * derivative ** (-alpha)
            except (NumericError, OverflowError, ZeroDivisionError) as exc:
                capacity = math.nan
                logger.debug(f"Derivative evaluation failed at step {step + 1}: {exc}")
        if not (math.isfinite(capacity) and capacity > 0):
            partial = _run(angles[:step], capacities[:step], params, seed) if step else None
            logger.error(f"HL({alpha}) produced capacity {capacity!r} at step {step + 1}")
            raise NumericError(f"Non-finite capacity at HL step {step + 1}.", partial=partial)
        capacities[step] = capacity
        previous = capacity
        current = current.append(angles[step], capacity)
    logger.info(f"Grew HL({alpha}) map with {n} slits, total capacity {float(np.sum(capacities)):.6g}")
    return _run(angles, capacities, params, seed)
