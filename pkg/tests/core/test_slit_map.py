import math

import numpy as np
import pytest
from pydantic import ValidationError

from loewner_forge.core import (
    DomainError,
    ElementarySlitMap,
    SingularityError,
    base_half_angle,
    elementary_derivative,
    eval_elementary,
    tip_distance,
)


def test_zero_capacity_is_identity():
    slit = ElementarySlitMap(angle=1.3, capacity=0.0)
    w = np.array([1.0, 2.0j, -3.0 + 1.0j])
    assert np.allclose(eval_elementary(slit, w), w)


@pytest.mark.parametrize("capacity", [1e-3, 0.1, 1.0])
def test_leading_coefficient(capacity):
    slit = ElementarySlitMap(angle=0.4, capacity=capacity)
    w = 1e6 * np.exp(0.2j)
    assert abs(eval_elementary(slit, w) / w - math.exp(capacity)) < 1e-5


def test_tip_is_image_of_attachment_point():
    capacity = 0.05
    slit = ElementarySlitMap(angle=0.0, capacity=capacity)
    tip = eval_elementary(slit, 1.0)
    assert abs(tip.imag) < 1e-12
    assert tip.real == pytest.approx(1.0 + tip_distance(capacity), rel=1e-12)


def test_tip_distance_scales_as_square_root():
    exponent = math.log(tip_distance(1e-6) / tip_distance(1e-8)) / math.log(100.0)
    assert exponent == pytest.approx(0.5, abs=1e-3)


@pytest.mark.parametrize("theta", [math.pi / 2, 2.0, -2.5, math.pi])
def test_arc_away_from_slit_stays_on_circle(theta):
    capacity = 0.2
    assert abs(theta) > base_half_angle(capacity)
    slit = ElementarySlitMap(angle=0.0, capacity=capacity)
    assert abs(eval_elementary(slit, np.exp(1j * theta))) == pytest.approx(1.0, abs=1e-9)


def test_rotation_covariance():
    phi, w = 2.1, 1.4 * np.exp(0.5j)
    rotated = eval_elementary(ElementarySlitMap(angle=phi, capacity=0.3), w)
    base = eval_elementary(ElementarySlitMap(angle=0.0, capacity=0.3), w * np.exp(-1j * phi))
    assert rotated == pytest.approx(np.exp(1j * phi) * base, abs=1e-12)


def test_derivative_matches_finite_difference():
    slit = ElementarySlitMap(angle=0.7, capacity=0.25)
    w, h = 1.5 * np.exp(0.3j), 1e-6
    numeric = (eval_elementary(slit, w + h) - eval_elementary(slit, w - h)) / (2 * h)
    assert elementary_derivative(slit, w) == pytest.approx(numeric, rel=1e-6)


def test_points_inside_disk_are_rejected():
    slit = ElementarySlitMap(angle=0.0, capacity=0.1)
    with pytest.raises(DomainError):
        eval_elementary(slit, 0.5)
    with pytest.raises(DomainError):
        elementary_derivative(slit, 1.0)


def test_non_finite_points_are_rejected():
    with pytest.raises(DomainError):
        eval_elementary(ElementarySlitMap(angle=0.0, capacity=0.1), complex("nan"))


def test_slit_base_is_singular():
    capacity = 0.1
    slit = ElementarySlitMap(angle=0.0, capacity=capacity)
    with pytest.raises(SingularityError):
        eval_elementary(slit, np.exp(1j * base_half_angle(capacity)))


def test_angle_normalization():
    assert ElementarySlitMap(angle=-math.pi / 2, capacity=0.1).angle == pytest.approx(1.5 * math.pi)
    assert ElementarySlitMap(angle=5 * math.pi, capacity=0.1).angle == pytest.approx(math.pi)


@pytest.mark.parametrize("capacity", [-1e-3, float("inf"), float("nan")])
def test_invalid_capacity(capacity):
    with pytest.raises(ValidationError):
        ElementarySlitMap(angle=0.0, capacity=capacity)
