import math

import numpy as np
import pytest
from pydantic import ValidationError

from loewner_forge.core import ParameterError
from loewner_forge.hele_shaw import (
    LaurentSeries,
    MapVelocity,
    cusp_ratio,
    exterior_map,
    interior_map,
    is_univalent,
    map_area,
    pk_residual,
    poisson_bracket,
    string_bracket,
    winding_number,
)
from loewner_forge.hele_shaw.laurent import boundary_points


def circle_velocity(r_dot: float) -> MapVelocity:
    return MapVelocity(r_dot=r_dot, coeff_dots=[0.0])


@pytest.mark.parametrize("r", [0.5, 1.0, 3.0])
def test_circle_solves_string_equation(r):
    assert pk_residual(exterior_map(r), circle_velocity(1 / (2 * r))) < 1e-10


def test_wrong_velocity_residual():
    f = exterior_map(2.0)
    assert pk_residual(f, circle_velocity(1.0)) == pytest.approx(3.0)
    assert pk_residual(f, MapVelocity.zero(f)) == pytest.approx(1.0)


def test_bracket_is_linear_in_velocities():
    f = exterior_map(1.0, [0.1, 0.2, 0.05j])
    velocity = MapVelocity(r_dot=0.3, coeff_dots=[0.1j, -0.2, 0.05])
    doubled = MapVelocity(r_dot=0.6, coeff_dots=2 * velocity.coeff_dots)
    base = string_bracket(f, velocity, 64)
    assert np.allclose(string_bracket(f, doubled, 64), 2 * base, atol=1e-13)
    assert np.max(np.abs(base.imag)) < 1e-12


def test_general_bracket_is_antisymmetric():
    f = LaurentSeries(powers=[1, -1], coeffs=[1.0, 0.2])
    g = LaurentSeries(powers=[1, 2], coeffs=[0.5j, 0.1])
    f_dot = LaurentSeries(powers=[0], coeffs=[1.0])
    g_dot = LaurentSeries(powers=[-2], coeffs=[0.3])
    assert np.allclose(poisson_bracket(f, f_dot, g, g_dot, 32), -poisson_bracket(g, g_dot, f, f_dot, 32))


def test_coarse_grid_is_rejected():
    f = exterior_map(1.0, [0.0, 0.1, 0.1])
    with pytest.raises(ParameterError):
        string_bracket(f, MapVelocity.zero(f), 4)


def test_orientation_mismatch():
    f = exterior_map(1.0, [0.0])
    with pytest.raises(ParameterError):
        pk_residual(f, MapVelocity(r_dot=0.5, coeff_dots=[0.0], orientation="interior"))


def test_ellipse_area_matches_polygon():
    f = exterior_map(1.0, [0.0, 0.2])
    assert map_area(f) == pytest.approx(0.96 * math.pi)
    z = boundary_points(f)
    shoelace = 0.5 * abs(np.sum(z.real * np.roll(z.imag, -1) - np.roll(z.real, -1) * z.imag))
    assert shoelace == pytest.approx(map_area(f), rel=1e-5)


def test_interior_area():
    f = interior_map(0.3, 1.0, [0.2])
    assert map_area(f) == pytest.approx(math.pi * (1.0 + 2 * 0.04))
    assert f(0.0) == pytest.approx(0.3)
    assert f.coefficient(2) == pytest.approx(0.2)


def test_univalence():
    assert is_univalent(exterior_map(1.0, [0.0, 0.3]))
    assert is_univalent(exterior_map(1.0, [0.0, 0.0, 0.4]))
    assert not is_univalent(exterior_map(1.0, [0.0, 0.0, 0.6]))


def test_cusp_ratio():
    assert cusp_ratio(exterior_map(2.0)) == pytest.approx(1.0)
    assert cusp_ratio(exterior_map(1.0, [0.0, 0.99])) == pytest.approx(0.01, abs=1e-9)


def test_winding_number():
    assert winding_number(exterior_map(1.0, [0.3]), 0.0) == 1
    assert winding_number(exterior_map(1.0, [2.0]), 0.0) == 0


@pytest.mark.parametrize("r", [0.0, -1.0, float("nan")])
def test_invalid_radius(r):
    with pytest.raises(ValidationError):
        exterior_map(r)
