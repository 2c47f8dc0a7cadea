"""
Integral Means
--------------
Monte Carlo estimators built on boundary derivative moments of whole-plane maps.

The integral-means spectrum is estimated from

.. math::

    \\int_0^{2\\pi} \\langle |\\mathcal{F}'(e^{\\varepsilon + i\\theta})|^q \\rangle\\, d\\theta
    \\asymp \\varepsilon^{-\\beta(q)},

by pooling the angle and ensemble averages (annealed average) and regressing the log-moment on
:math:`-\\log\\varepsilon` over a finite range of scales; that range is reported with every estimate.
The unbounded variant evaluates :math:`1/\\mathcal{F}(1/w)` at :math:`|w| = e^{-\\varepsilon}`.

:py:func:`~.moment_stationarity` checks that
:math:`\\rho = e^{\\mp qt}\\langle|\\mathcal{F}'(e^{iL}w, t)|^q\\rangle` does not depend on :math:`t`.
"""

import logging
import math
from functools import partial
from itertools import combinations
from typing import List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import stats

from loewner_forge.core.composite import CompositeMap, eval_derivative, invert_unbounded
from loewner_forge.core.errors import DomainError, NumericError, ParameterError
from loewner_forge.drivers.seed import RngSeed
from loewner_forge.growth.loewner import grow_whole_plane
from loewner_forge.multifractal.spectrum import SpectrumCurve
from loewner_forge.utils.devel import RealArray
from loewner_forge.utils.logging import collapse_num_list
from loewner_forge.utils.parallel import run_ensemble

logger = logging.getLogger(__name__)

MapSign = Literal["bounded", "unbounded"]

EPS_RANGE = (1e-3, 1e-1)
"""Admissible distances from the unit circle."""
MIN_ENSEMBLE = 100
"""Ensembles smaller than this give unreliable bootstrap errors; a warning is logged."""
MIN_STATIONARITY_ENSEMBLE = 500
MIN_ANGLES = 256
BOOTSTRAP_STREAM = 1


class BetaEstimate(BaseModel):
    """
    Finite-scale estimate of :math:`\\beta(q)`.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    q: float
    beta: float
    """Least-squares slope of :math:`\\log(2\\pi M(\\varepsilon))` against :math:`-\\log\\varepsilon`."""
    stderr: float = Field(ge=0)
    """Ensemble bootstrap standard error of ``beta``."""
    intercept: float
    eps_grid: RealArray
    log_moments: RealArray
    """:math:`\\log(2\\pi M(\\varepsilon))` of the pooled ensemble on ``eps_grid``."""
    ensemble: int = Field(gt=0)

    @property
    def scale_min(self) -> float:
        return float(np.min(self.eps_grid))

    @property
    def scale_max(self) -> float:
        return float(np.max(self.eps_grid))


class StationarityReport(BaseModel):
    """
    Estimates of :math:`\\rho` at several times and their largest pairwise discrepancy.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: RealArray
    rho: RealArray
    stderr: RealArray
    z_max: float = Field(ge=0)
    """Largest :math:`|\\rho_i - \\rho_j| / \\sqrt{s_i^2 + s_j^2}` over pairs of times."""
    ensemble: int


def check_eps_grid(eps_grid: Sequence[float]) -> np.ndarray:
    """
    :raises ParameterError: If the grid has fewer than two points, is not strictly decreasing
        or leaves :py:data:`EPS_RANGE`.
    """
    eps = np.asarray(eps_grid, dtype=np.float64)
    if eps.ndim != 1 or len(eps) < 2:
        raise ParameterError("The epsilon grid needs at least two scales.")
    if np.any(np.diff(eps) >= 0):
        raise ParameterError("The epsilon grid must be strictly decreasing.")
    low, high = EPS_RANGE
    if eps[-1] < low * (1 - 1e-12) or eps[0] > high * (1 + 1e-12):
        raise ParameterError(f"Epsilon values must lie in [{low}, {high}].")
    return eps


def _log_derivative(F: CompositeMap, eps: np.ndarray, n_theta: int, unbounded: bool) -> np.ndarray:
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    radius = np.exp(-eps if unbounded else eps)
    w = (radius[:, None] * np.exp(1j * theta)[None, :]).ravel()
    derivative = invert_unbounded(F).derivative(w) if unbounded else eval_derivative(F, w)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(np.asarray(derivative))).reshape(len(eps), n_theta)


def _moments(log_derivatives: np.ndarray, q: float) -> np.ndarray:
    with np.errstate(over="ignore"):
        moments = np.exp(q * log_derivatives).mean(axis=-1)
    bad = ~np.isfinite(moments) | (moments <= 0)
    if np.any(bad):
        error = NumericError(f"Non-finite derivative moments for q = {q}; q is too negative for this sample.")
        if moments.ndim > 1:
            error.with_note(f"members: {collapse_num_list(np.nonzero(bad.any(axis=1))[0].tolist())}")
        raise error
    return moments


def derivative_moments(
    F: CompositeMap, q: float, eps_grid: Sequence[float], n_theta: int = MIN_ANGLES, unbounded: bool = False
) -> np.ndarray:
    """
    Angle averages
    :math:`M(\\varepsilon) = \\frac{1}{2\\pi}\\int |\\mathcal{F}'(e^{\\pm\\varepsilon + i\\theta})|^q d\\theta`
    of a single map by the trapezoid rule on ``n_theta`` equispaced angles.

    :raises ParameterError: For an invalid grid or fewer than :py:data:`MIN_ANGLES` angles.
    :raises NumericError: If a moment is not finite.
    """
    eps = check_eps_grid(eps_grid)
    if n_theta < MIN_ANGLES:
        raise ParameterError(f"At least {MIN_ANGLES} angles are needed, got {n_theta}.")
    return _moments(_log_derivative(F, eps, n_theta, unbounded), q)


def ensemble_log_derivatives(
    ensemble: Sequence[CompositeMap],
    eps_grid: Sequence[float],
    n_theta: int = MIN_ANGLES,
    unbounded: bool = False,
    workers: Optional[int] = None,
    progress: bool = False,
) -> np.ndarray:
    """
    :math:`\\log|\\mathcal{F}'|` of every member on the sampling circles, shape ``(members, scales, angles)``.
    """
    eps = check_eps_grid(eps_grid)
    if n_theta < MIN_ANGLES:
        raise ParameterError(f"At least {MIN_ANGLES} angles are needed, got {n_theta}.")
    if len(ensemble) == 0:
        raise ParameterError("The ensemble is empty.")
    if len(ensemble) < MIN_ENSEMBLE:
        logger.warning(f"Ensemble of {len(ensemble)} maps is below {MIN_ENSEMBLE}; bootstrap errors are unreliable.")
    task = partial(_log_derivative, eps=eps, n_theta=n_theta, unbounded=unbounded)
    return np.stack(run_ensemble(task, ensemble, workers, desc="derivative moments", progress=progress))


def _slopes(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    centred = x - x.mean()
    return (y - y.mean(axis=-1, keepdims=True)) @ centred / np.dot(centred, centred)


def _estimate(
    log_derivatives: np.ndarray, q: float, eps: np.ndarray, bootstrap: int, rng: np.random.Generator
) -> BetaEstimate:
    moments = _moments(log_derivatives, q)
    x = -np.log(eps)
    log_moments = np.log(2.0 * math.pi * moments.mean(axis=0))
    fit = stats.linregress(x, log_moments)
    members = len(moments)
    if bootstrap > 1 and members > 1:
        resampled = moments[rng.integers(0, members, size=(bootstrap, members))].mean(axis=1)
        stderr = float(np.std(_slopes(x, np.log(2.0 * math.pi * resampled)), ddof=1))
    else:
        stderr = 0.0
    logger.debug(f"beta({q}) = {fit.slope:.5f} +- {stderr:.5f} from {members} maps")
    return BetaEstimate(
        q=q,
        beta=float(fit.slope),
        stderr=stderr,
        intercept=float(fit.intercept),
        eps_grid=eps,
        log_moments=log_moments,
        ensemble=members,
    )


def beta_estimate(
    ensemble: Sequence[CompositeMap],
    q: float,
    eps_grid: Sequence[float],
    n_theta: int = MIN_ANGLES,
    bootstrap: int = 200,
    seed: RngSeed = RngSeed(),
    unbounded: bool = False,
    workers: Optional[int] = None,
    progress: bool = False,
) -> BetaEstimate:
    """
    Estimate :math:`\\beta(q)` from an ensemble of whole-plane maps.

    :param ensemble: Whole-plane composite maps.
    :param eps_grid: Strictly decreasing distances from the circle inside :py:data:`EPS_RANGE`.
    :param bootstrap: Number of ensemble resamples for the standard error.
    :param seed: Stream of the bootstrap resampling.
    :param unbounded: Use the inverted map :math:`1/\\mathcal{F}(1/w)` inside the disk.
    :raises ParameterError: For an invalid grid or an empty ensemble.
    :raises NumericError: If a moment is not finite.
    """
    eps = check_eps_grid(eps_grid)
    log_derivatives = ensemble_log_derivatives(ensemble, eps, n_theta, unbounded, workers, progress)
    return _estimate(log_derivatives, float(q), eps, bootstrap, seed.generator(BOOTSTRAP_STREAM))


def beta_spectrum(
    ensemble: Sequence[CompositeMap],
    q_grid: Sequence[float],
    eps_grid: Sequence[float],
    n_theta: int = MIN_ANGLES,
    bootstrap: int = 200,
    seed: RngSeed = RngSeed(),
    unbounded: bool = False,
    workers: Optional[int] = None,
    progress: bool = False,
) -> SpectrumCurve:
    """
    :py:func:`~.beta_estimate` on a grid of ``q``, sharing the map evaluations.
    """
    eps = check_eps_grid(eps_grid)
    log_derivatives = ensemble_log_derivatives(ensemble, eps, n_theta, unbounded, workers, progress)
    estimates = [
        _estimate(log_derivatives, float(q), eps, bootstrap, seed.generator(BOOTSTRAP_STREAM, index))
        for index, q in enumerate(q_grid)
    ]
    return SpectrumCurve(
        abscissa=[e.q for e in estimates],
        values=[e.beta for e in estimates],
        stderr=[e.stderr for e in estimates],
        kind="beta",
        scale_min=float(eps.min()),
        scale_max=float(eps.max()),
    )


def _stationarity_member(
    index: int,
    *,
    kappa: float,
    q: float,
    w: complex,
    times: Sequence[float],
    seed: RngSeed,
    dt: float,
    T_burn: float,
    sign: MapSign,
    jump_rate: float,
    jump_scale: float,
) -> np.ndarray:
    samples = np.empty(len(times))
    for position, t in enumerate(times):
        run = grow_whole_plane(kappa, t, T_burn, dt, seed.member(index), jump_rate, jump_scale)
        # the newest slit sits at the driver value of the last interval
        tip = float(run.driver.interval_values()[-1])
        if sign == "bounded":
            derivative = eval_derivative(run.map, np.exp(1j * tip) * w)
        else:
            derivative = invert_unbounded(run.map).derivative(np.exp(-1j * tip) * w)
        samples[position] = math.exp((-q if sign == "bounded" else q) * t) * abs(complex(derivative)) ** q
    return samples


def pairwise_z(means: np.ndarray, stderr: np.ndarray) -> float:
    """
    Largest pairwise discrepancy in units of the pooled standard error; identical means give 0.
    """
    z_max = 0.0
    for i, j in combinations(range(len(means)), 2):
        difference = abs(means[i] - means[j])
        if difference == 0:
            continue
        pooled = math.hypot(stderr[i], stderr[j])
        z_max = max(z_max, math.inf if pooled == 0 else difference / pooled)
    return z_max


def moment_stationarity(
    kappa: float,
    q: float,
    w: complex,
    times: Sequence[float],
    seed: RngSeed = RngSeed(),
    ensemble: int = MIN_STATIONARITY_ENSEMBLE,
    dt: float = 1e-2,
    T_burn: float = 10.0,
    sign: MapSign = "bounded",
    jump_rate: float = 0.0,
    jump_scale: float = 0.0,
    workers: Optional[int] = None,
    progress: bool = False,
) -> StationarityReport:
    """
    Estimate :math:`\\rho(t) = e^{\\mp qt}\\langle|\\mathcal{F}'(e^{iL(t)}w, t)|^q\\rangle` at each listed time.

    Member ``i`` uses stream ``i`` at every time, so repeated times give identical estimates.
    For the unbounded sign the point is rotated by :math:`e^{-iL}`, the image of the rotation under inversion.

    :param w: Evaluation point, :math:`|w| > 1` for ``bounded`` and :math:`0 < |w| < 1` for ``unbounded``.
    :raises DomainError: If ``w`` is on the wrong side of the unit circle.
    :raises ParameterError: For an empty time list or an ensemble with fewer than two members.
    """
    w = complex(w)
    if sign == "bounded" and not abs(w) > 1:
        raise DomainError(f"The bounded moment needs |w| > 1, got {w}.")
    if sign == "unbounded" and not 0 < abs(w) < 1:
        raise DomainError(f"The unbounded moment needs 0 < |w| < 1, got {w}.")
    if len(times) == 0:
        raise ParameterError("At least one time is required.")
    if ensemble < 2:
        raise ParameterError(f"Stationarity needs an ensemble of at least two members, got {ensemble}.")
    if ensemble < MIN_STATIONARITY_ENSEMBLE:
        logger.warning(f"Ensemble of {ensemble} is below {MIN_STATIONARITY_ENSEMBLE}.")
    task = partial(
        _stationarity_member,
        kappa=kappa,
        q=q,
        w=w,
        times=list(times),
        seed=seed,
        dt=dt,
        T_burn=T_burn,
        sign=sign,
        jump_rate=jump_rate,
        jump_scale=jump_scale,
    )
    samples: List[np.ndarray] = run_ensemble(task, range(ensemble), workers, desc="stationarity", progress=progress)
    values = np.stack(samples)
    rho = values.mean(axis=0)
    stderr = values.std(axis=0, ddof=1) / math.sqrt(ensemble)
    z_max = pairwise_z(rho, stderr)
    logger.info(f"rho at t = {list(times)}: {np.round(rho, 5).tolist()}, max z = {z_max:.3f}")
    return StationarityReport(times=list(times), rho=rho, stderr=stderr, z_max=z_max, ensemble=ensemble)
