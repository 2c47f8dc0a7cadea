"""
Spectrum Curve
--------------
Sampled multifractal spectra: the integral-means spectrum :math:`\\beta(q)`,
the mass exponents :math:`\\tau(q)` and the singularity spectrum :math:`f(\\alpha)`.

Conventions: :math:`\\sum_j p_j^q \\asymp l^{\\tau(q)}`, so :math:`\\tau` is concave with
:math:`\\tau(0) = -D_0` and :math:`\\tau(1) = 0`; :math:`f(\\alpha)` is concave as well.
"""

import logging
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from loewner_forge.core.errors import ArtifactError
from loewner_forge.utils.devel import RealArray
from loewner_forge.utils.io import read_csv, write_csv

logger = logging.getLogger(__name__)

SpectrumKind = Literal["beta", "tau", "f"]

SHAPE_TOLERANCE = 1e-10
CSV_COLUMNS = ["q", "value", "stderr", "kind", "scale_min", "scale_max"]


def second_differences(abscissa: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Differences of consecutive secant slopes; non-positive everywhere for a concave curve."""
    slopes = np.diff(values) / np.diff(abscissa)
    return np.diff(slopes)


class SpectrumCurve(BaseModel):
    """
    A spectrum sampled on a strictly increasing grid.

    For ``beta`` and ``tau`` curves the abscissa is :math:`q`; for ``f`` curves it is :math:`\\alpha`.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    abscissa: RealArray
    values: RealArray
    stderr: Optional[RealArray] = None
    """Standard errors of ``values``; zeros when omitted."""
    kind: SpectrumKind
    scale_min: Optional[float] = None
    """Smallest scale (``epsilon`` or box side) entering the estimate, if any."""
    scale_max: Optional[float] = None
    hull: bool = False
    """Set when the curve was produced from a non-concave input and describes its concave envelope."""
    edge_hits: int = Field(default=0, ge=0)
    """Number of points whose Legendre extremum sat on the edge of the input grid."""

    @model_validator(mode="after")
    def validate_curve(self):
        if self.abscissa.ndim != 1 or self.abscissa.shape != self.values.shape or len(self.abscissa) == 0:
            raise ValueError("Abscissa and values must be non-empty arrays of equal length.")
        if np.any(np.diff(self.abscissa) <= 0):
            raise ValueError("Spectrum abscissa must be strictly increasing.")
        if not np.all(np.isfinite(self.abscissa)):
            raise ValueError("Spectrum abscissa must be finite.")
        if self.stderr is not None:
            if self.stderr.shape != self.values.shape:
                raise ValueError("Standard errors must match the values.")
            if np.any(self.stderr < 0):
                raise ValueError("Standard errors must be non-negative.")
        return self

    def __len__(self) -> int:
        return len(self.abscissa)

    @property
    def errors(self) -> np.ndarray:
        return np.zeros_like(self.values) if self.stderr is None else self.stderr

    def at(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Linear interpolation inside the sampled range."""
        return np.interp(x, self.abscissa, self.values)

    def is_concave(self, tol: float = SHAPE_TOLERANCE) -> bool:
        if len(self) < 3:
            return True
        return bool(np.all(second_differences(self.abscissa, self.values) <= tol))

    def is_convex(self, tol: float = SHAPE_TOLERANCE) -> bool:
        if len(self) < 3:
            return True
        return bool(np.all(second_differences(self.abscissa, self.values) >= -tol))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "q": self.abscissa,
                "value": self.values,
                "stderr": self.errors,
                "kind": self.kind,
                "scale_min": np.nan if self.scale_min is None else self.scale_min,
                "scale_max": np.nan if self.scale_max is None else self.scale_max,
            }
        )

    def dump_csv(self, path: Union[str, Path]) -> Path:
        """Write columns ``q, value, stderr, kind, scale_min, scale_max``; ``q`` holds :math:`\\alpha` for ``f``."""
        path = Path(path)
        write_csv(self.to_frame(), path)
        return path

    @classmethod
    def load_csv(cls, path: Union[str, Path]) -> "SpectrumCurve":
        """
        :raises ArtifactError: If the file is missing, malformed or mixes spectrum kinds.
        """
        path = Path(path)
        if not path.is_file():
            raise ArtifactError(f"Spectrum file {path} does not exist.")
        frame = read_csv(path)
        if list(frame.columns) != CSV_COLUMNS:
            raise ArtifactError(f"Spectrum file {path} must have columns {', '.join(CSV_COLUMNS)}.")
        kinds = frame["kind"].unique()
        if len(kinds) != 1:
            raise ArtifactError(f"Spectrum file {path} mixes kinds {list(kinds)}.")
        scale_min, scale_max = frame["scale_min"].iloc[0], frame["scale_max"].iloc[0]
        return cls(
            abscissa=frame["q"].to_numpy(),
            values=frame["value"].to_numpy(),
            stderr=frame["stderr"].to_numpy(),
            kind=kinds[0],
            scale_min=None if pd.isna(scale_min) else float(scale_min),
            scale_max=None if pd.isna(scale_max) else float(scale_max),
        )


def generalized_dimensions(curve: SpectrumCurve) -> np.ndarray:
    """
    :math:`D(q) = \\tau(q)/(q - 1)`; at :math:`q = 1` the information dimension :math:`\\tau'(1)`
    is taken from the sampled slope.

    :raises ValueError: If ``curve`` is not a ``tau`` curve.
    """
    if curve.kind != "tau":
        raise ValueError(f"Generalized dimensions need a tau curve, got {curve.kind!r}.")
    q, tau = curve.abscissa, curve.values
    with np.errstate(divide="ignore", invalid="ignore"):
        dimensions = tau / (q - 1.0)
    at_one = np.isclose(q, 1.0, rtol=0.0, atol=1e-12)
    if np.any(at_one):
        dimensions[at_one] = np.gradient(tau, q)[at_one] if len(q) > 1 else np.nan
    return dimensions
