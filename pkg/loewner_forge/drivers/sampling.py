"""
Sampling
--------
Samplers of driving functions:

- :py:func:`~.sample_brownian` -- Brownian motion with diffusion :math:`\\kappa`, the SLE driver;
- :py:func:`~.sample_levy` -- Brownian motion plus symmetric compound-Poisson jumps, the LLE driver;
- :py:func:`~.sample_uniform_angles` -- i.i.d. uniform angles for Hastings--Levitov aggregation.

All samplers are drift-free and draw exclusively from :py:meth:`~.RngSeed.generator`.
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from loewner_forge.core.errors import ParameterError
from loewner_forge.drivers.path import DriverKind, DriverPath, JumpAtom
from loewner_forge.drivers.seed import RngSeed

logger = logging.getLogger(__name__)


def _validate_grid(dt: float, steps: int) -> None:
    if not (dt > 0 and math.isfinite(dt)):
        raise ParameterError(f"Time step must be positive, got dt={dt}.")
    if steps < 1:
        raise ParameterError(f"At least one step is required, got steps={steps}.")


def _path(dt: float, increments: np.ndarray, kind: DriverKind, jumps: Optional[np.ndarray] = None) -> DriverPath:
    steps = increments.shape[0]
    return DriverPath(
        breakpoints=dt * np.arange(steps + 1),
        values=np.concatenate([[0.0], np.cumsum(increments)]),
        kind=kind,
        jumps=np.zeros(0) if jumps is None else jumps,
    )


def sample_brownian(kappa: float, dt: float, steps: int, seed: RngSeed) -> DriverPath:
    """
    Sample :math:`L(t) = \\sqrt{\\kappa} B(t)` on a uniform grid.

    :param kappa: Diffusion coefficient, non-negative.
    :param dt: Grid spacing.
    :param steps: Number of intervals.
    :param seed: Stream of the path.
    :raises ParameterError: On negative ``kappa``, non-positive ``dt`` or ``steps``.
    """
    if kappa < 0:
        raise ParameterError(f"kappa must be non-negative, got {kappa}.")
    _validate_grid(dt, steps)
    rng = seed.generator()
    increments = rng.normal(0.0, math.sqrt(kappa * dt), size=steps)
    logger.debug(f"Sampled Brownian driver: kappa={kappa}, dt={dt}, steps={steps}")
    return _path(dt, increments, DriverKind(name="brownian", kappa=kappa))


def sample_levy(
    kappa: float,
    jump_rate: float,
    jump_scale: float,
    dt: float,
    steps: int,
    seed: RngSeed,
    extra_atoms: Sequence[JumpAtom] = (),
) -> DriverPath:
    """
    Sample a symmetric Lévy driver: Brownian part of variance :math:`\\kappa\\,dt` per step plus jumps
    of size :math:`\\pm` ``jump_scale`` arriving at total rate ``jump_rate``.

    :param extra_atoms: Further ``(size, rate)`` atoms for a finite mixture.
    """
    if kappa < 0 or jump_rate < 0:
        raise ParameterError(f"kappa and jump_rate must be non-negative, got {kappa}, {jump_rate}.")
    if not jump_scale > 0:
        raise ParameterError(f"jump_scale must be positive, got {jump_scale}.")
    _validate_grid(dt, steps)
    atoms = ((float(jump_scale), float(jump_rate)), *((float(s), float(r)) for s, r in extra_atoms))
    kind = DriverKind(name="levy", kappa=kappa, atoms=atoms)

    rng = seed.generator()
    increments = rng.normal(0.0, math.sqrt(kappa * dt), size=steps)
    jumps = np.zeros(steps)
    for size, rate in atoms:
        counts = rng.poisson(rate * dt, size=steps)
        ups = rng.binomial(counts, 0.5)
        jumps += size * (2 * ups - counts)
    logger.debug(f"Sampled Levy driver with {int(np.count_nonzero(jumps))} jump intervals")
    return _path(dt, increments + jumps, kind, jumps)


def sample_uniform_angles(n: int, seed: RngSeed) -> DriverPath:
    """
    Sample ``n`` i.i.d. angles uniform on :math:`[0, 2\\pi)`.
    Breakpoints are placeholders :math:`0, \\dots, n - 1`; capacities are set later by the growth model.
    """
    if n < 1:
        raise ParameterError(f"At least one angle is required, got n={n}.")
    angles = seed.generator().uniform(0.0, 2.0 * math.pi, size=n)
    return DriverPath(breakpoints=np.arange(n, dtype=np.float64), values=angles, kind=DriverKind(name="uniform_iid"))


def zero_driver(dt: float, steps: int) -> DriverPath:
    """The degenerate Brownian path with :math:`\\kappa = 0`."""
    _validate_grid(dt, steps)
    return _path(dt, np.zeros(steps), DriverKind(name="brownian", kappa=0.0))
