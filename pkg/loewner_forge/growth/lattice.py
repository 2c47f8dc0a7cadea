"""
Lattice Cluster
---------------
Square-lattice clusters grown by DLA, their boundary (the white next neighbors)
and the boundary charges that give the attachment probabilities.
"""

import logging
import math
from pathlib import Path
from typing import Iterable, Optional, Set, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import stats

from loewner_forge.core.errors import ArtifactError, ParameterError
from loewner_forge.utils.devel import IntArray, RealArray
from loewner_forge.utils.io import read_csv, write_csv

logger = logging.getLogger(__name__)

Site = Tuple[int, int]

NEIGHBOR_OFFSETS = ((1, 0), (-1, 0), (0, 1), (0, -1))

CHARGE_SUM_TOLERANCE = 1e-9


def neighbors(site: Site) -> Tuple[Site, ...]:
    m, n = site
    return tuple((m + dm, n + dn) for dm, dn in NEIGHBOR_OFFSETS)


def boundary_of(occupied: Iterable[Site]) -> Set[Site]:
    """
    The unoccupied 4-neighbors of a set of sites.
    """
    occupied = set(occupied)
    return {nbr for site in occupied for nbr in neighbors(site) if nbr not in occupied}


def sorted_sites(sites: Iterable[Site]) -> np.ndarray:
    """Sites as an ``(k, 2)`` integer array in lexicographic order."""
    array = np.array(sorted(sites), dtype=np.int64).reshape(-1, 2)
    return array


class LatticeCluster(BaseModel):
    """
    Snapshot of a lattice cluster.

    Sites are stored in attachment order, so the row index of a site is its timestamp.
    Boundary sites are kept in lexicographic order, which fixes the order of the charges
    and makes sampling from them reproducible.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sites: IntArray
    """Occupied sites ``(m, n)`` in attachment order."""
    boundary: IntArray
    """Unoccupied 4-neighbors of the occupied set, lexicographically sorted."""
    charges: RealArray = Field(default_factory=lambda: np.zeros(0))
    """Boundary charges aligned with ``boundary``; empty if not computed."""

    @model_validator(mode="after")
    def validate_cluster(self):
        if self.sites.ndim != 2 or self.sites.shape[1] != 2 or len(self.sites) == 0:
            raise ValueError("A cluster needs at least one site given as (m, n) pairs.")
        occupied = {tuple(site) for site in self.sites.tolist()}
        if len(occupied) != len(self.sites):
            raise ValueError("Cluster sites must be distinct.")
        expected = sorted_sites(boundary_of(occupied))
        if self.boundary.shape != expected.shape or np.any(self.boundary != expected):
            raise ValueError("Boundary must be the sorted set of unoccupied 4-neighbors of the cluster.")
        if len(self.charges) > 0:
            if self.charges.shape != (len(self.boundary),):
                raise ValueError("Charges must be aligned with boundary sites.")
            if np.any(self.charges < 0):
                raise ValueError("Boundary charges must be non-negative.")
            if abs(float(np.sum(self.charges)) - 1.0) > CHARGE_SUM_TOLERANCE:
                raise ValueError(f"Boundary charges must sum to 1, got {float(np.sum(self.charges))!r}.")
        return self

    @classmethod
    def from_sites(cls, sites: Iterable[Site], charges: Optional[np.ndarray] = None) -> "LatticeCluster":
        """
        Build a cluster from sites in attachment order, recomputing its boundary.
        """
        sites = [tuple(int(c) for c in site) for site in sites]
        return cls(
            sites=np.array(sites, dtype=np.int64).reshape(-1, 2),
            boundary=sorted_sites(boundary_of(sites)),
            charges=np.zeros(0) if charges is None else charges,
        )

    @property
    def step(self) -> int:
        """Number of occupied sites."""
        return int(len(self.sites))

    @property
    def occupied(self) -> Set[Site]:
        return {tuple(site) for site in self.sites.tolist()}

    @property
    def timestamps(self) -> np.ndarray:
        return np.arange(self.step)

    @property
    def radius(self) -> float:
        """Largest Euclidean distance of an occupied site from the origin."""
        return float(np.max(np.hypot(self.sites[:, 0], self.sites[:, 1])))

    def with_charges(self, charges: np.ndarray) -> "LatticeCluster":
        return LatticeCluster(sites=self.sites, boundary=self.boundary, charges=charges)

    def charge_map(self) -> dict:
        """Charges keyed by boundary site."""
        return {tuple(site): float(q) for site, q in zip(self.boundary.tolist(), self.charges)}

    def truncated(self, n: int) -> "LatticeCluster":
        """The cluster as it was after ``n`` attachments."""
        if not 1 <= n <= self.step:
            raise ParameterError(f"Cannot truncate a cluster of {self.step} sites to {n}.")
        return LatticeCluster.from_sites(self.sites[:n].tolist())

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"step": self.timestamps, "m": self.sites[:, 0], "n": self.sites[:, 1]})

    def dump_csv(self, path: Union[str, Path]) -> Path:
        """Write the cluster as CSV with columns ``step, m, n``."""
        path = Path(path)
        write_csv(self.to_frame(), path)
        return path

    @classmethod
    def load_csv(cls, path: Union[str, Path]) -> "LatticeCluster":
        """
        :raises ArtifactError: If the file is missing or malformed.
        """
        path = Path(path)
        if not path.is_file():
            raise ArtifactError(f"Cluster file {path} does not exist.")
        frame = read_csv(path)
        if list(frame.columns) != ["step", "m", "n"]:
            raise ArtifactError(f"Cluster file {path} must have columns step, m, n.")
        frame = frame.sort_values("step")
        return cls.from_sites(zip(frame["m"].tolist(), frame["n"].tolist()))


def box_count_dimension(cluster: LatticeCluster, min_boxes: int = 4) -> float:
    """
    Box-counting estimate of the fractal dimension :math:`D_0` of the occupied sites.

    Box sizes are powers of two up to a quarter of the cluster span; the dimension is
    the slope of :math:`\\log N(\\varepsilon)` against :math:`\\log(1/\\varepsilon)`.

    :raises ParameterError: If the cluster is too small for a two-point fit.
    """
    sites = cluster.sites - cluster.sites.min(axis=0)
    span = int(sites.max()) + 1
    sizes = [2**k for k in range(int(math.log2(max(span // min_boxes, 1))) + 1)]
    if len(sizes) < 2:
        raise ParameterError(f"Cluster span {span} is too small for box counting.")
    counts = [len(np.unique(sites // size, axis=0)) for size in sizes]
    fit = stats.linregress(-np.log(sizes), np.log(counts))
    logger.debug(f"Box counts {counts} for sizes {sizes}")
    return float(fit.slope)
