import logging
import math

import numpy as np
import pytest

from loewner_forge.core import DomainError, NumericError, ParameterError, identity_map
from loewner_forge.drivers import RngSeed
from loewner_forge.growth import grow_whole_plane
from loewner_forge.multifractal import (
    beta_estimate,
    beta_exact_sle,
    beta_spectrum,
    derivative_moments,
    moment_stationarity,
)
from loewner_forge.multifractal import integral_means
from loewner_forge.multifractal.integral_means import check_eps_grid, pairwise_z

EPS = [0.1, 0.03, 0.01]


@pytest.fixture
def single_slit():
    return identity_map().append(0.0, 0.1)


def test_eps_grid_validation():
    assert check_eps_grid(EPS).tolist() == EPS
    for grid in ([0.1], [0.01, 0.1], [0.5, 0.1], [0.1, 1e-4]):
        with pytest.raises(ParameterError):
            check_eps_grid(grid)


def test_identity_moments():
    assert np.allclose(derivative_moments(identity_map(), 3.0, EPS), 1.0)
    with pytest.raises(ParameterError):
        derivative_moments(identity_map(), 1.0, EPS, n_theta=64)


def test_identity_ensemble(log_event_catcher):
    logs = log_event_catcher(logging.getLogger(integral_means.__name__), level=logging.WARNING)
    estimate = beta_estimate([identity_map()] * 5, 2.0, EPS)
    assert estimate.beta == pytest.approx(0.0, abs=1e-12)
    assert estimate.stderr == pytest.approx(0.0, abs=1e-12)
    assert estimate.ensemble == 5
    assert estimate.scale_min == 0.01 and estimate.scale_max == 0.1
    assert np.allclose(estimate.log_moments, math.log(2 * math.pi))
    assert len(logs) == 1


def test_unbounded_identity():
    estimate = beta_estimate([identity_map()] * 3, 1.0, EPS, unbounded=True)
    assert estimate.beta == pytest.approx(0.0, abs=1e-12)


def test_single_slit_is_smooth(single_slit):
    assert abs(beta_estimate([single_slit], 1.0, EPS).beta) < 0.05
    assert beta_estimate([single_slit], 2.0, EPS).beta < 0.3


def test_non_finite_moments(single_slit):
    with pytest.raises(NumericError):
        derivative_moments(single_slit, -2000.0, EPS)
    with pytest.raises(NumericError) as info:
        beta_estimate([identity_map(), single_slit], -2000.0, EPS)
    assert "members: [1]" in info.value.__notes__[0]


def test_bootstrap_is_seeded(hl_ensemble):
    ensemble = hl_ensemble(10, 20, seed=1)
    first = beta_estimate(ensemble, 2.0, EPS, seed=RngSeed(seed=5))
    second = beta_estimate(ensemble, 2.0, EPS, seed=RngSeed(seed=5))
    assert (first.beta, first.stderr) == (second.beta, second.stderr)
    assert first.stderr > 0


def test_worker_count_does_not_change_estimates(hl_ensemble):
    ensemble = hl_ensemble(6, 10, seed=2)
    sequential = beta_estimate(ensemble, 1.0, EPS, workers=1)
    parallel = beta_estimate(ensemble, 1.0, EPS, workers=2)
    assert np.array_equal(sequential.log_moments, parallel.log_moments)
    assert (sequential.beta, sequential.stderr) == (parallel.beta, parallel.stderr)


def test_spectrum_curve():
    curve = beta_spectrum([identity_map()] * 4, [-1.0, 0.0, 1.0, 2.0], EPS)
    assert curve.kind == "beta"
    assert np.allclose(curve.values, 0.0, atol=1e-12)
    assert curve.scale_min == 0.01 and curve.scale_max == 0.1


def test_pairwise_z():
    assert pairwise_z(np.array([1.0, 1.0]), np.array([0.1, 0.1])) == 0.0
    assert pairwise_z(np.array([1.0, 1.3]), np.array([0.1, 0.0])) == pytest.approx(3.0)
    assert pairwise_z(np.array([1.0, 1.3]), np.array([0.0, 0.0])) == math.inf


def test_zeroth_moment_is_stationary():
    report = moment_stationarity(2.0, 0.0, 1.5, [0.5, 1.0], ensemble=4, dt=0.1)
    assert np.array_equal(report.rho, np.ones(2))
    assert report.z_max == 0.0


def test_repeated_time_gives_zero_z():
    report = moment_stationarity(2.0, 1.0, 1.5, [0.5, 0.5], seed=RngSeed(seed=3), ensemble=8, dt=0.1)
    assert report.rho[0] == report.rho[1]
    assert report.z_max == 0.0


def test_unbounded_stationarity_runs():
    report = moment_stationarity(2.0, 1.0, 0.5, [0.2, 0.4], ensemble=4, dt=0.1, sign="unbounded")
    assert np.all(np.isfinite(report.rho))


def test_stationarity_domain():
    with pytest.raises(DomainError):
        moment_stationarity(2.0, 1.0, 0.5, [0.5], ensemble=4)
    with pytest.raises(DomainError):
        moment_stationarity(2.0, 1.0, 1.5, [0.5], ensemble=4, sign="unbounded")
    with pytest.raises(ParameterError):
        moment_stationarity(2.0, 1.0, 1.5, [], ensemble=4)


@pytest.mark.slow
@pytest.mark.parametrize("dt", [1e-2, 5e-3])
def test_bounded_moment_stationarity(dt):
    report = moment_stationarity(2.0, 1.0, 1.5, [0.5, 1.0, 2.0], seed=RngSeed(seed=8), ensemble=500, dt=dt)
    assert report.z_max < 3.0


@pytest.mark.slow
def test_hl0_spectrum_is_smooth(hl_ensemble):
    ensemble = hl_ensemble(100, 500, seed=4, delta_a=1e-5)
    for q in (1.0, 2.0):
        estimate = beta_estimate(ensemble, q, [0.1, 0.05, 0.02], seed=RngSeed(seed=4))
        assert abs(estimate.beta) < 3 * estimate.stderr + 0.05


@pytest.mark.slow
def test_sle_kappa_six_first_moment():
    ensemble = [grow_whole_plane(6.0, 0.0, 10.0, 5e-4, RngSeed(seed=6).member(i)).map for i in range(200)]
    estimate = beta_estimate(ensemble, 1.0, [0.1, 0.03, 0.01], seed=RngSeed(seed=6))
    assert estimate.stderr < 0.1
    assert abs(estimate.beta - beta_exact_sle(1.0, 6.0)) < 3 * estimate.stderr + 0.1
