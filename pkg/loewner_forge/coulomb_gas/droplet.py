"""
Droplet
-------
Shape statistics of the equilibrated gas.

At small :math:`\\hbar` the charges fill a droplet of constant density :math:`1/(\\pi\\hbar)`,
so :math:`N` charges cover area :math:`\\pi\\hbar N`. Densities are reported in units of
that bulk value (:math:`\\hat\\rho = 1` inside the droplet). The droplet of a harmonic
perturbation is the Hele-Shaw domain with the same moments, which
:py:func:`compare_to_hele_shaw` measures.
"""

import logging
import math
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from loewner_forge.core.errors import ParameterError
from loewner_forge.coulomb_gas.metropolis import GasChain
from loewner_forge.hele_shaw.laurent import LaurentMap, boundary_points, exterior_map, map_area
from loewner_forge.utils.devel import RealArray
from loewner_forge.utils.io import write_csv

logger = logging.getLogger(__name__)

MASS_FRACTION = 0.99
AREA_TOLERANCE = 0.05


def predicted_droplet_radius(hbar: float, T: float) -> float:
    """
    Radius :math:`\\sqrt{\\hbar T}` of the disk holding ``T`` charges at bulk density.

    With the density normalized as :math:`\\hat\\rho = 2\\pi\\hbar\\sum_i \\delta(z - z_i)`, a uniform
    :math:`\\hat\\rho = 2` means :math:`1/(\\pi\\hbar)` charges per unit area, so ``T`` charges
    fill the area :math:`\\pi\\hbar T` and :math:`R^2 = \\hbar T`.
    """
    if not (hbar > 0 and T > 0):
        raise ParameterError(f"Need hbar > 0 and T > 0, got hbar={hbar}, T={T}.")
    return math.sqrt(hbar * T)


def circular_droplet(hbar: float, T: float) -> LaurentMap:
    """The exterior map of the unperturbed droplet."""
    return exterior_map(predicted_droplet_radius(hbar, T))


class DropletStats(BaseModel):
    """
    Radial profile and size estimates of a droplet.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    edges: RealArray
    """Radial bin edges, starting at 0."""
    density: RealArray
    """Normalized density :math:`\\hat\\rho` per bin."""
    support_radius: float = Field(gt=0)
    """Radius enclosing :py:data:`MASS_FRACTION` of the charges."""
    moment_radius: float = Field(gt=0)
    """:math:`\\sqrt{2\\langle|z|^2\\rangle}`, exact for a uniformly filled disk."""
    snapshots: int = Field(ge=1)

    @property
    def area(self) -> float:
        return math.pi * self.moment_radius**2

    def flatness(self, fraction: float = 0.8) -> float:
        """Largest relative deviation from 1 of the bins lying inside ``fraction`` of the support radius."""
        inside = self.edges[1:] <= fraction * self.support_radius
        if not np.any(inside):
            raise ParameterError("No radial bin lies inside the requested radius; use more bins.")
        return float(np.max(np.abs(self.density[inside] - 1.0)))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"r_inner": self.edges[:-1], "r_outer": self.edges[1:], "density": self.density})

    def dump_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        write_csv(self.to_frame(), path)
        return path


def droplet_stats(chain: GasChain, bins: int = 32) -> DropletStats:
    """
    Radial density profile averaged over the second half of the chain.

    :param bins: Number of equal-width radial bins between 0 and the largest sampled radius.
    :raises ParameterError: If ``bins < 1`` or fewer than two snapshots were recorded.
    """
    if bins < 1 or len(chain) < 2:
        raise ParameterError(f"Need bins >= 1 and at least two snapshots, got {bins} and {len(chain)}.")
    points = chain.equilibrated()
    radii = np.abs(points).ravel()
    edges = np.linspace(0.0, float(np.max(radii)), bins + 1)
    counts, _ = np.histogram(radii, bins=edges)
    areas = math.pi * np.diff(edges**2)
    density = counts / (len(points) * areas) * math.pi * chain.state.hbar
    stats = DropletStats(
        edges=edges,
        density=density,
        support_radius=float(np.quantile(radii, MASS_FRACTION)),
        moment_radius=math.sqrt(2.0 * float(np.mean(radii**2))),
        snapshots=len(points),
    )
    logger.debug(f"Droplet of {chain.N} charges: support {stats.support_radius:.4g}, moment {stats.moment_radius:.4g}")
    return stats


def boundary_estimate(chain: GasChain, sectors: int = 16, centre: Optional[complex] = None) -> np.ndarray:
    """
    Boundary points of the droplet, one per angular sector.

    A star-shaped domain filled uniformly has :math:`\\langle|z - c|^2\\rangle = r(\\theta)^2/2` on a thin
    sector, so each sector radius is :math:`\\sqrt{2\\langle|z - c|^2\\rangle}` over the second half of the chain.

    :param centre: Centre of the sectors; defaults to the mean position.
    :return: Points :math:`c + r_j e^{i\\theta_j}` at the sector midpoints, counter-clockwise.
    :raises ParameterError: If a sector holds no charge.
    """
    if sectors < 3:
        raise ParameterError(f"At least three sectors are required, got {sectors}.")
    points = chain.equilibrated().ravel()
    centre = complex(np.mean(points)) if centre is None else complex(centre)
    shifted = points - centre
    angles = np.mod(np.angle(shifted), 2.0 * math.pi)
    index = np.minimum((angles / (2.0 * math.pi) * sectors).astype(np.int64), sectors - 1)
    counts = np.bincount(index, minlength=sectors)
    if np.any(counts == 0):
        raise ParameterError(f"Some of the {sectors} sectors are empty; sample longer or use fewer sectors.")
    second = np.bincount(index, weights=np.abs(shifted) ** 2, minlength=sectors) / counts
    midpoints = (np.arange(sectors) + 0.5) * 2.0 * math.pi / sectors
    return centre + np.sqrt(2.0 * second) * np.exp(1j * midpoints)


def boundary_harmonic(boundary: np.ndarray, m: int = 2, centre: complex = 0.0) -> float:
    """
    Cosine amplitude :math:`\\frac{2}{n}\\sum_j r_j\\cos m\\theta_j` of the boundary radius.

    A positive coupling :math:`t_2` stiffens the confinement along the real axis, so the second
    harmonic of its droplet is negative.
    """
    shifted = np.asarray(boundary, dtype=np.complex128) - centre
    return float(2.0 * np.mean(np.abs(shifted) * np.cos(m * np.angle(shifted))))


def _polyline_distance(points: np.ndarray, polyline: np.ndarray) -> np.ndarray:
    start = polyline
    segment = np.roll(polyline, -1) - polyline
    length = np.abs(segment) ** 2
    relative = points[:, None] - start[None, :]
    s = np.clip((relative * np.conj(segment)).real / np.where(length > 0, length, 1.0), 0.0, 1.0)
    return np.min(np.abs(relative - s * segment), axis=1)


def compare_to_hele_shaw(
    boundary: np.ndarray,
    f: LaurentMap,
    *,
    area: Optional[float] = None,
    n_theta: int = 512,
) -> float:
    """
    Symmetric Hausdorff distance between the closed polygon through ``boundary`` and the
    boundary curve of ``f``, divided by the radius :math:`\\sqrt{A/\\pi}` of the map's domain.

    :param area: Droplet area :math:`\\pi\\hbar T`; when given the map must enclose the same area
        within :py:data:`AREA_TOLERANCE`.
    :raises ParameterError: If the areas do not match or the boundary has fewer than three points.
    """
    boundary = np.asarray(boundary, dtype=np.complex128)
    if len(boundary) < 3:
        raise ParameterError("A boundary estimate needs at least three points.")
    domain_area = map_area(f)
    if area is not None and abs(domain_area - area) > AREA_TOLERANCE * area:
        raise ParameterError(f"Map area {domain_area:.6g} does not match the droplet area {area:.6g}.")
    curve = boundary_points(f, n_theta)
    distance = max(
        float(np.max(_polyline_distance(boundary, curve))),
        float(np.max(_polyline_distance(curve, boundary))),
    )
    return distance / math.sqrt(domain_area / math.pi)
