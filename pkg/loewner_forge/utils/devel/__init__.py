"""
Devel Utils
-----------
These utils contain helpers that are used across the toolkit:
pydantic annotations for numpy arrays and the floating-point guard decorator.
"""

from .array_types import (
    RealArray,
    IntArray,
    ComplexArray,
    real_array_validator,
    complex_array_validator,
    int_array_validator,
)
from .guards import numeric_guard
