import math

import numpy as np
import pytest
from pydantic import ValidationError

from loewner_forge.core import (
    CompositeMap,
    DomainError,
    ElementarySlitMap,
    ParameterError,
    SingularityError,
    eval_composite,
    eval_derivative,
    eval_elementary,
    eval_with_derivative,
    fit_leading_coefficient,
    identity_map,
    invert_unbounded,
    loewner_residual,
    loewner_rhs,
    whole_plane_rescale,
)
from loewner_forge.core import composite, slit_map
from loewner_forge.core.slit_map import base_half_angle


@pytest.fixture
def three_slits():
    return CompositeMap(angles=[0.1, 2.0, 4.0], capacities=[0.1, 0.2, 0.05])


def test_identity():
    w = np.array([1.5, -2.0j])
    assert np.allclose(eval_composite(identity_map(), w), w)
    assert len(identity_map()) == 0


def test_last_slit_is_applied_first():
    slits = [ElementarySlitMap(angle=0.3, capacity=0.1), ElementarySlitMap(angle=2.5, capacity=0.2)]
    F = CompositeMap.from_slits(slits)
    w = 1.2 * np.exp(1.0j)
    expected = eval_elementary(slits[0], eval_elementary(slits[1], w))
    assert eval_composite(F, w) == pytest.approx(expected, abs=1e-13)


def test_leading_coefficient_is_exponential_of_capacity(three_slits):
    assert three_slits.leading_coefficient == pytest.approx(math.exp(0.35))
    assert fit_leading_coefficient(three_slits) == pytest.approx(math.exp(0.35), rel=1e-6)


def test_whole_plane_rescale(three_slits):
    rescaled = whole_plane_rescale(three_slits, 0.35)
    assert fit_leading_coefficient(rescaled) == pytest.approx(1.0, rel=1e-6)
    with pytest.raises(ParameterError):
        whole_plane_rescale(three_slits, -1.0)


def test_derivative_matches_finite_difference(three_slits):
    w, h = 1.3 * np.exp(2.2j), 1e-6
    numeric = (eval_composite(three_slits, w + h) - eval_composite(three_slits, w - h)) / (2 * h)
    assert eval_derivative(three_slits, w) == pytest.approx(numeric, rel=1e-6)
    value, derivative = eval_with_derivative(three_slits, w)
    assert value == pytest.approx(eval_composite(three_slits, w))
    assert derivative == pytest.approx(eval_derivative(three_slits, w))


def test_append_adds_innermost_slit(three_slits):
    longer = three_slits.append(-1.0, 0.01)
    assert len(longer) == 4
    assert longer.angles[-1] == pytest.approx(2 * math.pi - 1.0)
    assert longer.truncated(3).capacities.tolist() == three_slits.capacities.tolist()


def test_loewner_residual_is_first_order(three_slits):
    w = 1.5 * np.exp(0.7j)
    coarse = abs(loewner_residual(three_slits, 0.2, 1e-4, w))
    fine = abs(loewner_residual(three_slits, 0.2, 5e-5, w))
    assert coarse / fine == pytest.approx(2.0, rel=0.1)


def test_loewner_rhs_singularity():
    with pytest.raises(SingularityError):
        loewner_rhs(np.exp(0.4j), 0.4)
    assert loewner_rhs(1e8, 0.0) == pytest.approx(1e8, rel=1e-7)


def test_inverted_map(three_slits):
    inverted = invert_unbounded(three_slits)
    assert inverted(0.5j) == pytest.approx(1.0 / eval_composite(three_slits, -2.0j))
    w, h = 0.4 * np.exp(1.0j), 1e-7
    numeric = (inverted(w + h) - inverted(w - h)) / (2 * h)
    assert inverted.derivative(w) == pytest.approx(numeric, rel=1e-5)
    with pytest.raises(DomainError):
        inverted(2.0)


def test_domain_checks(three_slits):
    with pytest.raises(DomainError):
        eval_composite(three_slits, 0.9)
    with pytest.raises(DomainError):
        eval_derivative(three_slits, 1.0)


def test_composite_applies_each_slit_once(three_slits, monkeypatch):
    calls = []

    def counted(z, angle, capacity):
        calls.append(angle)
        return slit_map.apply_slit(z, angle, capacity)

    monkeypatch.setattr(composite, "apply_slit", counted)
    eval_composite(three_slits, 1.5j)
    assert calls == [4.0, 2.0, 0.1]
    with pytest.raises(SingularityError):
        eval_composite(three_slits, np.exp(1j * (4.0 + base_half_angle(0.05))))


@pytest.mark.parametrize(
    "angles,capacities",
    [
        ([0.0, 1.0], [0.1]),
        ([0.0], [-0.1]),
        ([float("nan")], [0.1]),
    ],
)
def test_invalid_maps(angles, capacities):
    with pytest.raises(ValidationError):
        CompositeMap(angles=angles, capacities=capacities)


def test_json_dump(three_slits):
    restored = CompositeMap.model_validate_json(three_slits.model_dump_json())
    assert np.array_equal(restored.angles, three_slits.angles)
    assert np.array_equal(restored.capacities, three_slits.capacities)
