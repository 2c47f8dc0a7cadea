"""
Array Serialization
-------------------
Pydantic annotations that let numpy arrays live inside frozen models.

- :py:data:`~.RealArray`:
    A field annotated with this is coerced to a read-only ``float64`` array
    and serialized to a JSON list.
- :py:data:`~.ComplexArray`:
    Same for ``complex128`` arrays; JSON form is a list of ``[re, im]`` pairs.
- :py:data:`~.IntArray`:
    Same for ``int64`` arrays.
"""

from typing import Any, List

import numpy as np
from typing_extensions import Annotated, TypeAlias
from pydantic import BeforeValidator, PlainSerializer, WithJsonSchema


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


def real_array_validator(value: Any) -> np.ndarray:
    """
    Coerce a sequence of numbers into a read-only float array.

    :param value: Any array-like value.
    :return: Read-only ``float64`` array.
    """
    return _frozen(np.asarray(value, dtype=np.float64))


def int_array_validator(value: Any) -> np.ndarray:
    """
    Coerce a sequence of integers into a read-only integer array.

    :param value: Any array-like value of integers.
    :return: Read-only ``int64`` array.
    """
    return _frozen(np.asarray(value, dtype=np.int64))


def complex_array_validator(value: Any) -> np.ndarray:
    """
    Coerce complex numbers or ``[re, im]`` pairs into a read-only complex array.

    :param value: Array-like of complex numbers, or a list of two-element lists as produced by
        :py:func:`~.complex_array_serializer`.
    :return: Read-only ``complex128`` array.
    """
    if isinstance(value, np.ndarray) and np.iscomplexobj(value):
        return _frozen(value.astype(np.complex128))
    array = np.asarray(value)
    if np.isrealobj(array) and array.ndim == 2 and array.shape[1] == 2:
        pairs = array.astype(np.float64)
        return _frozen(pairs[:, 0] + 1j * pairs[:, 1])
    return _frozen(array.astype(np.complex128))


def real_array_serializer(array: np.ndarray) -> List[float]:
    return [float(x) for x in np.asarray(array).ravel()]


def int_array_serializer(array: np.ndarray) -> List[Any]:
    return np.asarray(array).tolist()


def complex_array_serializer(array: np.ndarray) -> List[List[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(array).ravel()]


RealArray: TypeAlias = Annotated[
    np.ndarray,
    BeforeValidator(real_array_validator),
    PlainSerializer(real_array_serializer, when_used="json"),
    WithJsonSchema({"type": "array", "items": {"type": "number"}}),
]
"""Read-only float array field."""

IntArray: TypeAlias = Annotated[
    np.ndarray,
    BeforeValidator(int_array_validator),
    PlainSerializer(int_array_serializer, when_used="json"),
    WithJsonSchema({"type": "array"}),
]
"""Read-only integer array field (any shape)."""

ComplexArray: TypeAlias = Annotated[
    np.ndarray,
    BeforeValidator(complex_array_validator),
    PlainSerializer(complex_array_serializer, when_used="json"),
    WithJsonSchema({"type": "array", "items": {"type": "array", "items": {"type": "number"}}}),
]
"""Read-only complex array field; JSON form is a list of ``[re, im]`` pairs."""
