import math

import numpy as np
import pytest

from loewner_forge.core import DomainError, SingularityError
from loewner_forge.tau_functions import (
    geometric_momenta,
    halfplane_potential,
    kdv_kernel,
    kp_kernel,
    kp_phase_shift,
    translation_potential,
)


def test_geometric_momenta_are_translation_invariant():
    momenta, table = geometric_momenta(0.7, 0.3, 10)
    assert momenta[1] / momenta[0] == pytest.approx(math.exp(0.6))
    kernel = kdv_kernel(momenta)
    for l in range(10):
        for m in range(10):
            if l != m:
                assert abs(kernel[l, m] - table[abs(l - m) - 1]) < 1e-12


def test_translation_potential_decays():
    values = translation_potential(np.arange(1, 60), 0.3)
    assert np.all(np.diff(values) < 0)
    assert values[-1] < 1e-12
    assert translation_potential(1, 0.5) == pytest.approx(-2 * math.log(math.tanh(0.5)))


def test_geometric_momenta_need_positive_parameters():
    with pytest.raises(DomainError):
        geometric_momenta(1.0, 0.0, 5)


def test_kp_phase_shift_value():
    assert kp_phase_shift(1j, 2j) == pytest.approx(2 * math.log(3))
    assert halfplane_potential(1j, 2j) == pytest.approx(2 * math.log(3))


def test_kp_phase_shift_matches_halfplane_potential():
    rng = np.random.default_rng(5)
    for _ in range(100):
        z, w = rng.normal(size=2) + 1j * rng.uniform(0.1, 2.0, size=2)
        assert kp_phase_shift(z, w) == pytest.approx(halfplane_potential(z, w), abs=1e-12)


def test_image_charge_cancels_on_axis():
    assert abs(kp_phase_shift(0.5 + 1j, 2.0 + 1e-9j)) < 1e-8


def test_kp_kernel_matches_pairwise_shifts():
    points = np.array([0.1 + 0.5j, -1.0 + 1.0j, 2.0 + 0.2j])
    kernel = kp_kernel(points)
    assert kernel[0, 2] == pytest.approx(kp_phase_shift(points[0], points[2]), rel=1e-13)
    assert np.allclose(kernel, kernel.T)
    assert np.all(np.diag(kernel) == 0)


def test_kp_errors():
    with pytest.raises(DomainError):
        kp_phase_shift(1j, -1j)
    with pytest.raises(SingularityError):
        kp_phase_shift(1j, 1j)
