import itertools
import math

import numpy as np
import pytest
from pydantic import ValidationError

from loewner_forge.core import NumericError, ParameterError
from loewner_forge.tau_functions import (
    SolitonData,
    kdv_kernel,
    kdv_potential,
    kdv_residual,
    kp_phase_shift,
    kp_tau,
    lattice_gas_energy,
    log_tau,
    tau_hirota,
)


def test_empty_sum():
    assert tau_hirota(SolitonData.kdv([])) == 1.0


def test_one_soliton():
    k, phi, x, t3 = 1.3, 0.2, 0.5, 0.1
    theta = -phi - k * x + k**3 * t3
    data = SolitonData.kdv([k], [phi], x=x, higher=(t3,))
    assert tau_hirota(data) == pytest.approx(1 + math.exp(-theta), rel=1e-14)


def test_two_solitons():
    k1, k2 = 0.8, 1.5
    data = SolitonData.kdv([k1, k2], [0.1, -0.3], x=0.4)
    theta = data.theta()
    shift = -math.log((k1 - k2) ** 2 / (k1 + k2) ** 2)
    expected = 1 + math.exp(-theta[0]) + math.exp(-theta[1]) + math.exp(-shift - theta[0] - theta[1])
    assert tau_hirota(data) == pytest.approx(expected, rel=1e-14)


def test_matches_direct_enumeration():
    rng = np.random.default_rng(7)
    momenta = np.sort(rng.uniform(0.5, 2.0, 10))
    data = SolitonData.kdv(momenta, rng.normal(size=10), x=0.3, higher=(0.05,))
    G, theta = kdv_kernel(momenta), data.theta()
    direct = sum(
        math.exp(-lattice_gas_energy(sigma, G, theta)[0]) for sigma in itertools.product([0, 1], repeat=10)
    )
    assert tau_hirota(data) == pytest.approx(direct, rel=1e-12)


def test_log_sum_exp_survives_large_phases():
    data = SolitonData.kdv([1.0, 2.0], [800.0, 0.0])
    shift = -math.log((1.0 / 3.0) ** 2)
    assert log_tau(data) == pytest.approx(800.0 + math.log1p(math.exp(-shift)), rel=1e-12)
    with pytest.raises(NumericError):
        tau_hirota(data)


def test_lattice_gas_energy():
    G = np.array([[0.0, 1.5], [1.5, 0.0]])
    assert lattice_gas_energy([0, 0], G, [0.3, 0.4]) == (0.0, 0)
    assert lattice_gas_energy([1, 0], G, [0.0, 0.0]) == (0.0, 1)
    assert lattice_gas_energy([1, 1], G, [0.3, 0.4]) == (pytest.approx(2.2), 2)
    with pytest.raises(ParameterError):
        lattice_gas_energy([2, 0], G, [0.0, 0.0])


def test_one_soliton_potential():
    k = 1.2
    data = SolitonData.kdv([k])
    x = np.linspace(-5, 5, 11)
    expected = -0.5 * k**2 / np.cosh(k * x / 2) ** 2
    assert np.allclose(kdv_potential(data, x), expected, atol=1e-14)


def test_one_soliton_residual():
    data = SolitonData.kdv([1.0])
    assert kdv_residual(data, 1e-2) < 1e-4
    assert kdv_residual(data, 5e-3) < 3e-5


def test_trivial_residual():
    assert kdv_residual(SolitonData.kdv([]), 1e-2) == 0.0


def test_three_soliton_residual_converges_at_second_order():
    rng = np.random.default_rng(11)
    data = SolitonData.kdv(rng.uniform(0.5, 2.0, 3), rng.normal(size=3))
    coarse, fine = kdv_residual(data, 2e-2), kdv_residual(data, 1e-2)
    assert 3.0 < coarse / fine < 5.0


def test_unresolved_grid_is_rejected():
    with pytest.raises(ParameterError):
        kdv_residual(SolitonData.kdv([2.0]), 0.1)


def test_kp_two_solitons():
    z = [0.3 + 1.0j, -0.5 + 0.7j]
    t1, t2 = 0.2, 0.1
    data = SolitonData(momenta=z, phases=[0.1, 0.2], times=[t1, t2], kind="kp")
    theta = [phi + 2 * p.real * t1 + 2 * (p**2).imag * t2 for phi, p in zip([0.1, 0.2], z)]
    G = kp_phase_shift(*z)
    expected = 1 + math.exp(-theta[0]) + math.exp(-theta[1]) + math.exp(-G - theta[0] - theta[1])
    assert kp_tau(data) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize(
    "momenta,kind",
    [
        ([1.0, -1.0], "kdv"),
        ([1.0, 1.0], "kdv"),
        ([1.0 + 1.0j], "kdv"),
        ([1.0 - 1.0j], "kp"),
    ],
)
def test_invalid_data(momenta, kind):
    with pytest.raises(ValidationError):
        SolitonData(momenta=momenta, phases=np.zeros(len(momenta)), times=[0.0], kind=kind)
