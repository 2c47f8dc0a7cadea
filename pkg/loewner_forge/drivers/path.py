"""
Driver Path
-----------
Piecewise-constant sample paths of the driving function :math:`L(t)`.
"""

import logging
import math
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from loewner_forge.core.errors import ArtifactError, ParameterError
from loewner_forge.utils.devel import RealArray
from loewner_forge.utils.io import read_csv, write_csv

logger = logging.getLogger(__name__)

JumpAtom = Tuple[float, float]
"""A symmetric two-point jump atom ``(size, rate)``; jumps of ``+size`` and ``-size`` each occur at rate/2."""


class DriverKind(BaseModel):
    """
    Tag of the process a path was sampled from, together with its parameters.
    """

    model_config = ConfigDict(frozen=True)

    name: Literal["brownian", "levy", "uniform_iid", "prescribed"]
    kappa: float = Field(default=0.0, ge=0)
    """Diffusion coefficient: the Brownian part has variance :math:`\\kappa t`."""
    atoms: Tuple[JumpAtom, ...] = ()
    """Jump atoms of a Lévy path; empty for other kinds."""

    @model_validator(mode="after")
    def validate_atoms(self):
        for size, rate in self.atoms:
            if size <= 0 or rate < 0 or not math.isfinite(size) or not math.isfinite(rate):
                raise ValueError(f"Invalid jump atom (size={size}, rate={rate}).")
        return self

    @property
    def jump_rate(self) -> float:
        return float(sum(rate for _, rate in self.atoms))


class DriverPath(BaseModel):
    """
    A piecewise-constant path: on :math:`[t_k, t_{k+1})` the driver equals ``values[k]``.

    ``values`` has the same length as ``breakpoints``; the last entry is the terminal value
    :math:`L(t_n)`. Angles are stored unwrapped and reduced modulo :math:`2\\pi` only when consumed.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    breakpoints: RealArray
    """Strictly increasing times starting at 0."""
    values: RealArray
    """Unwrapped driver values at the breakpoints."""
    kind: DriverKind
    jumps: RealArray = Field(default_factory=lambda: np.zeros(0))
    """Net jump displacement on each interval (Lévy paths only)."""

    @model_validator(mode="after")
    def validate_path(self):
        if self.breakpoints.ndim != 1 or self.breakpoints.shape != self.values.shape:
            raise ValueError("Breakpoints and values must be one-dimensional arrays of equal length.")
        if len(self.breakpoints) == 0 or self.breakpoints[0] != 0:
            raise ValueError("Breakpoints must start at 0.")
        if np.any(np.diff(self.breakpoints) <= 0):
            raise ValueError("Breakpoints must be strictly increasing.")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Driver values must be finite.")
        if self.kind.name in ("brownian", "levy") and self.values[0] != 0:
            raise ValueError("Brownian and Lévy paths start at L(0) = 0.")
        return self

    @property
    def t_total(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def steps(self) -> int:
        """Number of intervals of a time-driven path."""
        return len(self.breakpoints) - 1

    @property
    def jump_count(self) -> int:
        """Number of intervals carrying a non-zero net jump."""
        return int(np.count_nonzero(self.jumps))

    def value_at(self, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """
        Evaluate the (unwrapped) path at time(s) ``t``.

        :raises ParameterError: If ``t`` is outside :math:`[0, t_n]`.
        """
        times = np.asarray(t, dtype=np.float64)
        if np.any(times < 0) or np.any(times > self.t_total):
            raise ParameterError(f"Driver evaluated outside [0, {self.t_total}].")
        index = np.clip(np.searchsorted(self.breakpoints, times, side="right") - 1, 0, len(self.values) - 1)
        result = self.values[index]
        return float(result) if result.ndim == 0 else result

    def interval_values(self) -> np.ndarray:
        """Driver value on each interval :math:`[t_k, t_{k+1})`."""
        return self.values[:-1]

    def interval_lengths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def angles(self) -> np.ndarray:
        """All values reduced modulo :math:`2\\pi`."""
        return np.mod(self.values, 2.0 * math.pi)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.breakpoints, "L": self.values})

    def dump_csv(self, path: Union[str, Path]) -> Path:
        """
        Write the path as CSV with columns ``t, L``.
        """
        path = Path(path)
        write_csv(self.to_frame(), path)
        return path

    @classmethod
    def load_csv(cls, path: Union[str, Path], kind: Optional[DriverKind] = None) -> "DriverPath":
        """
        Load a path from a ``t, L`` CSV. Without ``kind`` the path is tagged ``prescribed``.

        :raises ArtifactError: If the file is missing or lacks the expected columns.
        """
        path = Path(path)
        if not path.is_file():
            raise ArtifactError(f"Driver file {path} does not exist.")
        frame = read_csv(path)
        missing: List[str] = [column for column in ("t", "L") if column not in frame.columns]
        if missing:
            raise ArtifactError(f"Driver file {path} lacks columns {missing}.")
        return cls(
            breakpoints=frame["t"].to_numpy(),
            values=frame["L"].to_numpy(),
            kind=kind or DriverKind(name="prescribed"),
        )
