"""
Growth Run
----------
The result of a growth simulation: a composite map (HL, SLE, LLE) or a lattice cluster (DLA),
the driver that produced it and the parameters it was produced with.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from loewner_forge.core.composite import CompositeMap
from loewner_forge.core.errors import ArtifactError
from loewner_forge.drivers.path import DriverPath
from loewner_forge.drivers.seed import RngSeed
from loewner_forge.growth.lattice import LatticeCluster
from loewner_forge.utils.io import read_csv, write_csv

logger = logging.getLogger(__name__)

CAPACITY_TOLERANCE = 1e-12


class GrowthRun(BaseModel):
    """
    One realization of a growth model.

    Exactly one of ``map`` and ``cluster`` is set.
    For time-driven maps the driver intervals equal the slit capacities;
    for Hastings--Levitov maps the driver holds one angle per slit.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    map: Optional[CompositeMap] = None
    cluster: Optional[LatticeCluster] = None
    driver: Optional[DriverPath] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    """Model parameters such as ``alpha``, ``delta_a``, ``kappa``, ``dt``."""
    seed: Optional[RngSeed] = None
    diagnostics: Dict[str, float] = Field(default_factory=dict)
    """Run summaries, e.g. the largest charge-sum error of a DLA run."""

    @model_validator(mode="after")
    def validate_run(self):
        if (self.map is None) == (self.cluster is None):
            raise ValueError("A growth run holds either a composite map or a lattice cluster.")
        if self.map is not None and self.driver is not None:
            if self.driver.kind.name == "uniform_iid":
                if len(self.driver.values) != len(self.map):
                    raise ValueError("Hastings-Levitov runs need one driver angle per slit.")
            else:
                lengths = self.driver.interval_lengths()
                if len(lengths) != len(self.map) or not np.allclose(
                    lengths, self.map.capacities, rtol=0.0, atol=CAPACITY_TOLERANCE
                ):
                    raise ValueError("Driver intervals must match slit capacities.")
        return self

    @property
    def capacities(self) -> np.ndarray:
        return np.zeros(0) if self.map is None else self.map.capacities

    def map_frame(self) -> pd.DataFrame:
        """The map as a table with columns ``index, angle, capacity`` (slit 1 has index 1)."""
        if self.map is None:
            raise ArtifactError("This run holds a lattice cluster, not a map.")
        return pd.DataFrame(
            {
                "index": np.arange(1, len(self.map) + 1),
                "angle": self.map.angles,
                "capacity": self.map.capacities,
            }
        )

    def dump_map_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        write_csv(self.map_frame(), path)
        return path


def load_map_csv(path: Union[str, Path], log_scale: float = 0.0) -> CompositeMap:
    """
    Read a map dump written by :py:meth:`~.GrowthRun.dump_map_csv`.

    :raises ArtifactError: If the file is missing or malformed.
    """
    path = Path(path)
    if not path.is_file():
        raise ArtifactError(f"Map file {path} does not exist.")
    frame = read_csv(path)
    if list(frame.columns) != ["index", "angle", "capacity"]:
        raise ArtifactError(f"Map file {path} must have columns index, angle, capacity.")
    frame = frame.sort_values("index")
    return CompositeMap(
        angles=frame["angle"].to_numpy(dtype=np.float64),
        capacities=frame["capacity"].to_numpy(dtype=np.float64),
        log_scale=log_scale,
    )
