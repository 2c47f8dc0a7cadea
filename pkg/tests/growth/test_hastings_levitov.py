import numpy as np
import pytest

from loewner_forge.core import ParameterError
from loewner_forge.drivers import RngSeed
from loewner_forge.growth import grow_hl


def test_hl0_capacities_are_constant():
    run = grow_hl(0.0, 1e-3, 100, RngSeed(seed=1))
    assert np.all(run.capacities == 1e-3)
    assert len(run.map) == 100


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.0])
def test_first_capacity_is_delta_a(alpha):
    run = grow_hl(alpha, 1e-3, 3, RngSeed(seed=2))
    assert run.capacities[0] == 1e-3


def test_hl2_capacities_are_positive():
    run = grow_hl(2.0, 1e-4, 300, RngSeed(seed=3))
    assert np.all(np.isfinite(run.capacities))
    assert np.all(run.capacities > 0)
    assert np.all(np.diff(np.cumsum(run.capacities)) > 0)
    assert run.params["alpha"] == 2.0


def test_driver_holds_slit_angles():
    run = grow_hl(1.0, 1e-3, 20, RngSeed(seed=4))
    assert run.driver.kind.name == "uniform_iid"
    assert np.allclose(run.driver.values, run.map.angles)


def test_reproducible():
    first = grow_hl(2.0, 1e-3, 30, RngSeed(seed=5))
    second = grow_hl(2.0, 1e-3, 30, RngSeed(seed=5))
    assert np.array_equal(first.capacities, second.capacities)


@pytest.mark.parametrize("args", [(2.0, 1e-3, 0), (2.0, 0.0, 10), (2.0, -1.0, 10)])
def test_invalid_parameters(args):
    with pytest.raises(ParameterError):
        grow_hl(*args, RngSeed())


@pytest.mark.slow
def test_hl2_long_run():
    run = grow_hl(2.0, 1e-4, 1000, RngSeed(seed=6))
    assert np.all(np.isfinite(run.capacities)) and np.all(run.capacities > 0)
