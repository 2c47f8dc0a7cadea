import math

import numpy as np
import pytest

from loewner_forge.core import DomainError, ParameterError
from loewner_forge.hele_shaw import (
    HarmonicTestFunction,
    domain_integral,
    dump_moments_csv,
    evolve_string,
    exterior_map,
    harmonic_moments,
    interior_map,
    interior_moments,
    moments_frame,
    quadrature_check,
    quadrature_coefficients,
    richardson_invariance,
)
from loewner_forge.utils.io import read_csv


def test_circle_moments_vanish():
    vector = harmonic_moments(exterior_map(1.5), 5)
    assert np.max(np.abs(vector.moments)) < 1e-12
    assert vector.area == pytest.approx(math.pi * 2.25)


def test_ellipse_moments():
    vector = harmonic_moments(exterior_map(1.0, [0.0, 0.2]), 4)
    assert vector.area == pytest.approx(0.96 * math.pi)
    assert vector[2] == pytest.approx(-0.2 * math.pi, abs=1e-10)
    assert abs(vector[1]) < 1e-12 and abs(vector[3]) < 1e-12


def test_shifted_disk_against_polar_integration():
    z0, R = 0.3, 1.0
    vector = harmonic_moments(exterior_map(R, [z0]), 6)
    assert vector[1] == pytest.approx(-math.pi * z0, abs=1e-10)
    theta = 2 * math.pi * np.arange(4096) / 4096
    rho = z0 * np.cos(theta) + np.sqrt(R**2 - (z0 * np.sin(theta)) ** 2)
    for k in range(3, 7):
        direct = np.mean(np.exp(-1j * k * theta) * rho ** (2 - k) / (k - 2)) * 2 * math.pi
        assert vector[k] == pytest.approx(direct, abs=1e-6)


def test_origin_outside_domain():
    with pytest.raises(DomainError):
        harmonic_moments(exterior_map(1.0, [2.0]), 3)


def test_orientation_checks():
    with pytest.raises(ParameterError):
        harmonic_moments(interior_map(0.0, 1.0), 2)
    with pytest.raises(ParameterError):
        interior_moments(exterior_map(1.0), 2)


def test_interior_first_moment():
    r, u2 = 0.05, 0.001
    vector = interior_moments(interior_map(0.3, r, [u2]), 3)
    assert vector[1] == pytest.approx(math.pi * r**2 * u2, rel=1e-9)
    assert abs(vector[2]) < 1e-15


@pytest.mark.slow
def test_moments_are_conserved_to_second_order():
    f = exterior_map(1.0, [0.0, 0.1, 0.05])
    coarse = richardson_invariance(evolve_string(f, 1e-3, 500), 5)
    fine = richardson_invariance(evolve_string(f, 5e-4, 1000), 5)
    assert np.max(coarse) < 1e-5
    worst = int(np.argmax(coarse))
    assert 2.5 < coarse[worst] / fine[worst] < 6.0


def test_area_increases_along_trajectory():
    trajectory = evolve_string(exterior_map(1.0, [0.0, 0.1, 0.05]), 1e-3, 50)
    assert np.all(np.diff(trajectory.areas()) > 0)


def test_moments_csv(tmp_path):
    trajectory = evolve_string(exterior_map(1.0, [0.0, 0.1]), 1e-3, 3)
    frame = read_csv(dump_moments_csv(trajectory, 2, tmp_path / "moments.csv"))
    assert list(frame.columns) == ["t", "k", "re", "im"]
    assert len(frame) == 4 * 3
    assert set(frame["k"]) == {0, 1, 2}

    expected = moments_frame(trajectory, 2)
    for column in ("t", "re", "im"):
        assert np.array_equal(frame[column].to_numpy(), expected[column].to_numpy())


def test_disk_quadrature():
    z0, R = 0.3 + 0.2j, 0.7
    f = interior_map(z0, R)
    q_hat = quadrature_coefficients(f)
    assert q_hat == pytest.approx([math.pi * R**2])
    residual = quadrature_check(f, HarmonicTestFunction(kind="re_power", power=2), q_hat, z0)
    assert residual < 1e-10
    assert domain_integral(f, HarmonicTestFunction(kind="constant")) == pytest.approx(math.pi * R**2)


@pytest.mark.parametrize(
    "phi",
    [
        HarmonicTestFunction(kind="re_power", power=3),
        HarmonicTestFunction(kind="im_power", power=4),
        HarmonicTestFunction(kind="constant"),
    ],
)
def test_polynomial_domains_are_quadrature_domains(phi):
    f = interior_map(0.1, 1.0, [0.2, 0.05])
    assert quadrature_check(f, phi, quadrature_coefficients(f), f.source) < 1e-9


@pytest.mark.slow
def test_point_source_growth_is_monopole():
    f = interior_map(0.3, 0.05, [0.001])
    trajectory = evolve_string(f, 1e-4, 2500)
    final = trajectory.final
    area = math.pi * interior_moments(final, 1).t_area
    residual = quadrature_check(final, HarmonicTestFunction(kind="re_power", power=1), [area], 0.3)
    assert residual < 1e-4 * area
