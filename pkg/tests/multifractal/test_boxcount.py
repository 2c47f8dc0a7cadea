import logging

import numpy as np
import pytest

from loewner_forge.core import ParameterError
from loewner_forge.drivers import RngSeed
from loewner_forge.growth import LatticeCluster, dla_grow, exact_charges
from loewner_forge.multifractal import dyadic_scales, tau_boxcount, tau_from_measure
from loewner_forge.multifractal import boxcount


def test_dyadic_scales():
    assert dyadic_scales(40.0).tolist() == [1.0, 2.0, 4.0, 8.0]
    assert dyadic_scales(2.0).tolist() == [1.0]


def test_uniform_line():
    sites = np.stack([np.arange(64), np.zeros(64, dtype=int)], axis=1)
    curve = tau_from_measure(sites, np.full(64, 1 / 64), [-1.0, 0.0, 1.0, 2.0], [1, 2, 4, 8])
    assert np.allclose(curve.values, curve.abscissa - 1.0, atol=1e-12)
    assert -curve.at(0.0) == pytest.approx(1.0)
    assert curve.scale_min == 1.0 and curve.scale_max == 8.0
    assert np.allclose(curve.errors, 0.0, atol=1e-12)


def test_single_box():
    curve = tau_from_measure([[3, 4]], [1.0], [0.5, 1.0, 2.0], [1, 2, 4])
    assert np.allclose(curve.values, 0.0)


def test_unnormalized_weights_give_same_slopes():
    rng = np.random.default_rng(2)
    sites = rng.integers(0, 32, size=(200, 2))
    weights = rng.uniform(size=200)
    scales = [1, 2, 4, 8]
    first = tau_from_measure(sites, weights, [0.0, 2.0], scales)
    second = tau_from_measure(sites, 5.0 * weights, [0.0, 2.0], scales)
    assert np.allclose(first.values, second.values)


def test_measure_validation():
    with pytest.raises(ParameterError):
        tau_from_measure([[0, 0], [1, 0]], [1.0], [1.0], [1, 2, 4])
    with pytest.raises(ParameterError):
        tau_from_measure([[0, 0]], [-1.0], [1.0], [1, 2, 4])
    with pytest.raises(ParameterError):
        tau_from_measure([[0, 0]], [0.0], [1.0], [1, 2, 4])
    with pytest.raises(ParameterError, match="usable scales"):
        tau_from_measure([[0, 0]], [1.0], [1.0], [0.25, 0.5, 1, 2])


def test_few_scales_warning(log_event_catcher):
    logs = log_event_catcher(logging.getLogger(boxcount.__name__), level=logging.WARNING)
    tau_from_measure([[0, 0], [5, 5]], [0.5, 0.5], [1.0], [1, 2, 4])
    assert len(logs) == 1


def test_cluster_needs_charges():
    with pytest.raises(ParameterError, match="charges"):
        tau_boxcount(LatticeCluster.from_sites([(0, 0)]), [0.0, 1.0])


def test_seed_charges():
    cluster = exact_charges(LatticeCluster.from_sites([(0, 0)]))
    curve = tau_boxcount(cluster, [0.0, 1.0, 2.0], scales=[1, 2, 4])
    assert curve.kind == "tau"
    assert curve.at(1.0) == pytest.approx(0.0, abs=1e-12)
    assert curve.at(0.0) < 0


@pytest.mark.slow
def test_dla_charge_spectrum():
    cluster = dla_grow(2000, RngSeed(seed=11)).cluster
    curve = tau_boxcount(cluster, [0.0, 1.0, 2.0])
    assert len(dyadic_scales(cluster.radius)) >= 4
    assert 1.0 < -curve.at(0.0) < 2.0
    assert abs(curve.at(1.0)) < 0.05
    assert curve.at(2.0) > 0
