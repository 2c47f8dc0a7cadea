import numpy as np
import pytest
from pydantic import BaseModel, ConfigDict

from loewner_forge.core import NumericError
from loewner_forge.utils.devel import ComplexArray, IntArray, RealArray, numeric_guard


class Arrays(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    real: RealArray
    sites: IntArray
    points: ComplexArray


def test_arrays_are_read_only():
    arrays = Arrays(real=[1, 2], sites=[[0, 1], [1, 0]], points=[1j])
    assert arrays.real.dtype == np.float64
    assert arrays.sites.shape == (2, 2)
    with pytest.raises(ValueError):
        arrays.real[0] = 5.0


def test_json_round_trip():
    arrays = Arrays(real=[0.1], sites=[[3, -2]], points=[1 - 2j, 0.5])
    dumped = arrays.model_dump(mode="json")
    assert dumped["points"] == [[1.0, -2.0], [0.5, 0.0]]
    restored = Arrays.model_validate(dumped)
    assert np.array_equal(restored.points, arrays.points)
    assert np.array_equal(restored.sites, arrays.sites)


@numeric_guard
def exponentiate(x):
    return np.exp(np.asarray(x, dtype=np.float64))


def test_numeric_guard():
    assert exponentiate(0.0) == 1.0
    with pytest.raises(NumericError) as info:
        exponentiate(1e6)
    assert "exponentiate" in str(info.value)
