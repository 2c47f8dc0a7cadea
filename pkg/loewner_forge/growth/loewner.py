"""
Loewner Growth
--------------
Radial and whole-plane Loewner evolutions with a piecewise-constant driver.

A driver held at :math:`L_k` on :math:`[t_k, t_{k+1})` produces exactly the slit map with angle
:math:`L_k` and capacity :math:`t_{k+1} - t_k`, so composing slits solves the Loewner equation
for that driver. A Brownian driver gives radial SLE, a Lévy driver gives LLE.
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from loewner_forge.core.composite import CompositeMap, eval_composite, whole_plane_rescale
from loewner_forge.core.errors import ParameterError
from loewner_forge.drivers.path import DriverPath, JumpAtom
from loewner_forge.drivers.sampling import sample_brownian, sample_levy
from loewner_forge.drivers.seed import RngSeed
from loewner_forge.growth.run import GrowthRun

logger = logging.getLogger(__name__)

MIN_BURN_IN = 10.0
"""Smallest burn-in time accepted by :py:func:`~.grow_whole_plane`."""
TRACE_OFFSET = 1e-4


def resample_driver(driver: DriverPath, dt: float) -> DriverPath:
    """
    Hold the driver constant on a uniform grid of spacing ``dt``; the last interval may be shorter.
    """
    if not dt > 0:
        raise ParameterError(f"Grid spacing must be positive, got {dt}.")
    starts = np.arange(0.0, driver.t_total, dt)
    starts = starts[driver.t_total - starts > 1e-12 * max(1.0, driver.t_total)]
    breakpoints = np.append(starts, driver.t_total)
    values = np.append(np.asarray(driver.value_at(starts)), driver.values[-1])
    return DriverPath(breakpoints=breakpoints, values=values, kind=driver.kind)


def grow_driven(driver: DriverPath, dt: Optional[float] = None) -> GrowthRun:
    """
    Solve the Loewner equation for a piecewise-constant driver.

    :param driver: Time-driven path on :math:`[0, t]`.
    :param dt: Optional grid spacing; the driver is resampled on it. By default its own intervals are used.
    :return: Run whose slit :math:`k` has angle :math:`L_k \\bmod 2\\pi` and capacity :math:`t_{k+1} - t_k`.
    :raises ParameterError: For angle-sequence drivers, which have no time parametrization.
    """
    if driver.kind.name == "uniform_iid":
        raise ParameterError("Hastings-Levitov angle sequences are grown with grow_hl.")
    if driver.steps < 1:
        raise ParameterError("The driver must cover at least one interval.")
    if dt is not None:
        driver = resample_driver(driver, dt)
    F = CompositeMap(angles=np.mod(driver.interval_values(), 2.0 * math.pi), capacities=driver.interval_lengths())
    params = {"model": driver.kind.name, "kappa": driver.kind.kappa, "t": driver.t_total, "dt": dt}
    logger.debug(f"Driven growth with {len(F)} slits up to t = {driver.t_total}")
    return GrowthRun(map=F, driver=driver, params=params)


def grow_whole_plane(
    kappa: float,
    t: float,
    T_burn: float,
    dt: float,
    seed: RngSeed,
    jump_rate: float = 0.0,
    jump_scale: float = 0.0,
    extra_atoms: Sequence[JumpAtom] = (),
) -> GrowthRun:
    """
    Grow on :math:`[0, T + t]` and rescale by :math:`e^{-T}`, approximating the whole-plane map
    :math:`\\mathcal{F}(w, t) = \\lim_{T \\to \\infty} e^{-T} F(w, T + t)`.

    :param kappa: Brownian diffusion coefficient.
    :param t: Whole-plane time; the leading coefficient of the result is :math:`e^t`.
    :param T_burn: Burn-in time :math:`T`, at least :py:data:`~.MIN_BURN_IN`.
    :param dt: Driver grid spacing.
    :param seed: RNG stream of the driver.
    :param jump_rate: Poisson rate of symmetric jumps; non-zero rates give whole-plane LLE.
    :param jump_scale: Size of the jumps.
    :raises ParameterError: If ``T_burn`` is below the minimum or ``t`` is negative.
    """
    if T_burn < MIN_BURN_IN:
        raise ParameterError(f"Burn-in must be at least {MIN_BURN_IN}, got {T_burn}.")
    if t < 0:
        raise ParameterError(f"Whole-plane time must be non-negative, got {t}.")
    steps = int(math.ceil((T_burn + t) / dt - 1e-9))
    if jump_rate > 0 or extra_atoms:
        driver = sample_levy(kappa, jump_rate, jump_scale, dt, steps, seed, extra_atoms=extra_atoms)
    else:
        driver = sample_brownian(kappa, dt, steps, seed)
    if abs(driver.t_total - (T_burn + t)) > 1e-12:
        driver = DriverPath(
            breakpoints=np.append(driver.breakpoints[:-1], T_burn + t),
            values=driver.values,
            kind=driver.kind,
            jumps=driver.jumps,
        )
    run = grow_driven(driver)
    params = {
        "model": "whole_plane",
        "kappa": float(kappa),
        "t": float(t),
        "T_burn": float(T_burn),
        "dt": float(dt),
        "jump_rate": float(jump_rate),
        "jump_scale": float(jump_scale),
    }
    return run.model_copy(update={"map": whole_plane_rescale(run.map, T_burn), "params": params, "seed": seed})


def trace_points(F: CompositeMap, n_theta: int = 2048, eps: float = TRACE_OFFSET) -> np.ndarray:
    """
    Image of the circle :math:`|w| = 1 + \\varepsilon` sampled at ``n_theta`` angles, for plotting.
    """
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    return np.asarray(eval_composite(F, (1.0 + eps) * np.exp(1j * theta)))


def slit_angle_jumps(F: CompositeMap, threshold: float) -> int:
    """
    Number of consecutive slit pairs whose angles differ by more than ``threshold`` on the circle.
    """
    gaps = np.abs(np.angle(np.exp(1j * np.diff(F.angles))))
    return int(np.count_nonzero(gaps > threshold))
