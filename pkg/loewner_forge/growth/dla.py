"""
DLA
---
Diffusion-limited aggregation on the square lattice.

The exact mode grows the cluster by sampling the next site from the boundary charges,
which solve the difference Laplace equation outside the cluster with :math:`P = 0` on the
boundary sites and the far field :math:`P_{m,n} \\to -\\frac{1}{4\\pi}\\log(m^2 + n^2)` imposed on
the edge of a box around the midpoint of the cluster, so the charges keep every symmetry of the
cluster. The walker mode releases lattice random walkers from a launch circle and attaches them
at the first boundary site they visit.
"""

import logging
import math
from typing import Dict, List, Literal, Optional, Set, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import fft, linalg
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import cg

from loewner_forge.core.errors import NumericError, ParameterError
from loewner_forge.drivers.seed import RngSeed
from loewner_forge.growth.lattice import (
    CHARGE_SUM_TOLERANCE,
    NEIGHBOR_OFFSETS,
    LatticeCluster,
    Site,
    neighbors,
    sorted_sites,
)
from loewner_forge.growth.run import GrowthRun
from loewner_forge.utils.devel import RealArray

logger = logging.getLogger(__name__)

FIELD_TOLERANCE = 1e-8
"""Maximal 5-point residual over free sites accepted from the harmonic solver."""
CLAMP_TOLERANCE = 1e-12
"""Negative charges above ``-CLAMP_TOLERANCE`` are rounding noise and are clamped to zero."""
BOX_FACTOR = 4.0
"""The box half-width is at least this multiple of the cluster radius (plus one)."""
BOX_GROWTH = 1.5
MAX_BOX_RADIUS = 4096

_OFFSETS = np.array(NEIGHBOR_OFFSETS, dtype=np.int64)


def far_field(m: np.ndarray, n: np.ndarray) -> np.ndarray:
    """The continuum far-field value :math:`-\\frac{1}{4\\pi}\\log(m^2 + n^2)`."""
    return -np.log(np.asarray(m, dtype=np.float64) ** 2 + np.asarray(n, dtype=np.float64) ** 2) / (4.0 * math.pi)


def default_box_radius(cluster_radius: float) -> int:
    return max(16, int(math.ceil(BOX_FACTOR * (cluster_radius + 1.0))))


def box_centre(cluster: LatticeCluster) -> Tuple[float, float]:
    """Midpoint of the bounding box of the occupied sites, a lattice or half-lattice point."""
    low, high = cluster.sites.min(axis=0), cluster.sites.max(axis=0)
    return float(low[0] + high[0]) / 2.0, float(low[1] + high[1]) / 2.0


def box_limits(centre: Tuple[float, float], box_radius: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Edge coordinates of the box around ``centre``.

    An axis with a half-lattice centre gets one extra row so the box stays symmetric about it.

    :return: Lower and upper edge coordinates per axis.
    :raises ParameterError: If ``centre`` is not a lattice or half-lattice point.
    """
    twice = 2.0 * np.asarray(centre, dtype=np.float64)
    rounded = np.rint(twice).astype(np.int64)
    if twice.shape != (2,) or not np.allclose(twice, rounded, rtol=0.0, atol=1e-9):
        raise ParameterError(f"Box centre {centre!r} is not a lattice or half-lattice point.")
    return np.floor_divide(rounded, 2) - box_radius, -np.floor_divide(-rounded, 2) + box_radius


def _check_box(cluster: LatticeCluster, box_radius: int, centre: Tuple[float, float]) -> None:
    lower, upper = box_limits(centre, box_radius)
    if np.any(cluster.boundary <= lower + 1) or np.any(cluster.boundary >= upper - 1):
        raise ParameterError(f"Box half-width {box_radius} around {centre} does not contain the cluster boundary.")
    if box_radius < BOX_FACTOR * cluster.radius:
        logger.warning(f"Box half-width {box_radius} is below {BOX_FACTOR}x the cluster radius {cluster.radius:.1f}")


class HarmonicField(BaseModel):
    """
    Lattice field on the box of half-width :math:`B` around ``centre``.

    Occupied sites hold NaN, boundary sites hold zero and the box edge holds the far-field values
    measured from ``centre``.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    box_radius: int
    centre: Tuple[float, float] = (0.0, 0.0)
    values: RealArray
    """Field values indexed as ``values[m - lower_m, n - lower_n]`` with the lower box edge from ``box_limits``."""
    residual: float
    """Maximal 5-point residual over free sites."""

    def at(self, m, n):
        lower, _ = box_limits(self.centre, self.box_radius)
        return self.values[np.asarray(m) - lower[0], np.asarray(n) - lower[1]]


def dla_harmonic_field(
    cluster: LatticeCluster,
    box_radius: Optional[int] = None,
    tol: float = FIELD_TOLERANCE,
    x0: Optional[np.ndarray] = None,
    centre: Optional[Tuple[float, float]] = None,
) -> HarmonicField:
    """
    Solve the 5-point Laplace system on the free sites of the box by conjugate gradients.

    :param cluster: The cluster; its boundary sites carry :math:`P = 0`.
    :param box_radius: Box half-width :math:`B`; defaults to :math:`4(R + 1)` for cluster radius :math:`R`.
    :param tol: Maximal accepted 5-point residual.
    :param x0: Optional warm start over the free sites in row-major order.
    :param centre: Centre of the box and of the far field; defaults to :py:func:`~.box_centre`.
    :raises ParameterError: If the box does not contain the cluster boundary.
    :raises NumericError: If the solver does not reach ``tol``; the residual is attached as a note.
    """
    box_radius = default_box_radius(cluster.radius) if box_radius is None else int(box_radius)
    centre = box_centre(cluster) if centre is None else (float(centre[0]), float(centre[1]))
    _check_box(cluster, box_radius, centre)
    lower, upper = box_limits(centre, box_radius)
    shape = tuple(int(k) for k in upper - lower + 1)
    mm, nn = np.meshgrid(np.arange(lower[0], upper[0] + 1), np.arange(lower[1], upper[1] + 1), indexing="ij")

    fixed = np.zeros(shape)
    edge = (mm == lower[0]) | (mm == upper[0]) | (nn == lower[1]) | (nn == upper[1])
    fixed[edge] = far_field(mm[edge] - centre[0], nn[edge] - centre[1])
    occupied = np.zeros(shape, dtype=bool)
    occupied[cluster.sites[:, 0] - lower[0], cluster.sites[:, 1] - lower[1]] = True
    zero = np.zeros(shape, dtype=bool)
    zero[cluster.boundary[:, 0] - lower[0], cluster.boundary[:, 1] - lower[1]] = True
    free = ~(edge | occupied | zero)

    index = np.full(shape, -1, dtype=np.int64)
    free_i, free_j = np.nonzero(free)
    count = len(free_i)
    index[free_i, free_j] = np.arange(count)

    rows, cols = [np.arange(count)], [np.arange(count)]
    data = [np.full(count, 4.0)]
    rhs = np.zeros(count)
    for dm, dn in NEIGHBOR_OFFSETS:
        ni, nj = free_i + dm, free_j + dn
        if np.any(occupied[ni, nj]):
            raise NumericError("A free site touches the cluster; the boundary is inconsistent.")
        linked = free[ni, nj]
        rows.append(np.nonzero(linked)[0])
        cols.append(index[ni[linked], nj[linked]])
        data.append(np.full(int(linked.sum()), -1.0))
        rhs += np.where(linked, 0.0, fixed[ni, nj])
    matrix = coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(count, count)
    ).tocsr()

    solution, info = cg(matrix, rhs, x0=x0, rtol=0.0, atol=1e-3 * tol, maxiter=20 * count + 100)
    values = fixed.copy()
    values[free] = solution
    values[occupied] = np.nan

    inner = values[1:-1, 1:-1]
    laplacian = 4.0 * inner - values[2:, 1:-1] - values[:-2, 1:-1] - values[1:-1, 2:] - values[1:-1, :-2]
    residual = float(np.max(np.abs(laplacian[free[1:-1, 1:-1]]))) if count else 0.0
    logger.debug(f"Harmonic field on box {box_radius}: {count} free sites, cg info {info}, residual {residual:.2e}")
    if info != 0 or residual > tol:
        raise NumericError("Lattice Laplace solver did not converge.").with_note(f"residual: {residual:.3e}")
    return HarmonicField(box_radius=box_radius, centre=centre, values=values, residual=residual)


def _normalize_charges(raw: np.ndarray) -> np.ndarray:
    if np.any(raw < -CLAMP_TOLERANCE):
        raise NumericError("Negative boundary flux.").with_note(f"min flux: {float(raw.min()):.3e}")
    raw = np.where(raw < 0, 0.0, raw)
    total = float(np.sum(raw))
    if not total > 0:
        raise NumericError("Boundary flux does not normalize.").with_note(f"total flux: {total!r}")
    charges = raw / total
    if abs(float(np.sum(charges)) - 1.0) > CHARGE_SUM_TOLERANCE:
        raise NumericError("Charge normalization failed.")
    return charges


def dla_charges(cluster: LatticeCluster, field: HarmonicField) -> LatticeCluster:
    """
    Boundary charges from the discrete normal flux :math:`-\\sum P_{\\text{nbr}}` over free neighbors,
    normalized to unit total.

    :return: The cluster with ``charges`` aligned to its sorted boundary.
    :raises NumericError: If the total flux is not positive or a flux is clearly negative.
    """
    occupied = cluster.occupied
    zero = {tuple(site) for site in cluster.boundary.tolist()}
    raw = np.zeros(len(cluster.boundary))
    for k, site in enumerate(cluster.boundary.tolist()):
        free = [nbr for nbr in neighbors(tuple(site)) if nbr not in occupied and nbr not in zero]
        if free:
            raw[k] = -float(np.sum(field.at(*np.array(free).T)))
    return cluster.with_charges(_normalize_charges(raw))


class CapacitanceSolver:
    """
    Boundary charges on a fixed box through the capacitance form of the lattice problem.

    With :math:`G` the Dirichlet Green's function of the box Laplacian and :math:`u_0` the harmonic
    extension of the far-field edge data, the field is :math:`P = u_0 + G f` with sources :math:`f`
    on boundary sites fixed by :math:`P = 0` there. The sources equal the discrete normal fluxes, so the
    charges follow from one dense symmetric positive system per step. Green's function entries are
    built once per site; one attachment changes only a few rows.

    The box has half-width ``box_radius`` around ``centre`` (see :py:func:`~.box_limits`) and the far
    field is measured from ``centre``.
    """

    def __init__(self, box_radius: int, centre: Tuple[float, float] = (0.0, 0.0)):
        self.box_radius = int(box_radius)
        self.centre = (float(centre[0]), float(centre[1]))
        self._lower, self._upper = box_limits(self.centre, self.box_radius)
        self._shape = tuple(int(k) for k in self._upper - self._lower - 1)
        rows, columns = self._shape
        eigenvalues = [2.0 - 2.0 * np.cos(np.pi * np.arange(1, k + 1) / (k + 1)) for k in self._shape]
        self._mu = np.arccosh(1.0 + eigenvalues[0] / 2.0)
        self._denominator = 2.0 * np.sinh(self._mu) * -np.expm1(-2.0 * self._mu * (columns + 1))
        modes = np.arange(1, rows + 1)
        self._sines = math.sqrt(2.0 / (rows + 1)) * np.sin(np.outer(modes, modes) * np.pi / (rows + 1))
        self._base = self._edge_extension(*eigenvalues)
        self._sites = np.zeros((0, 2), dtype=np.int64)
        self._matrix = np.zeros((0, 0))
        self._count = 0

    def _edge_extension(self, row_eigenvalues: np.ndarray, column_eigenvalues: np.ndarray) -> np.ndarray:
        (lo_m, lo_n), (hi_m, hi_n) = self._lower, self._upper
        cm, cn = self.centre
        m = np.arange(lo_m + 1, hi_m) - cm
        n = np.arange(lo_n + 1, hi_n) - cn
        rhs = np.zeros(self._shape)
        rhs[0, :] += far_field(lo_m - cm, n)
        rhs[-1, :] += far_field(hi_m - cm, n)
        rhs[:, 0] += far_field(m, lo_n - cn)
        rhs[:, -1] += far_field(m, hi_n - cn)
        spectrum = fft.dstn(rhs, type=1, norm="ortho") / (row_eigenvalues[:, None] + column_eigenvalues[None, :])
        return fft.idstn(spectrum, type=1, norm="ortho")

    def base_field(self, sites: np.ndarray) -> np.ndarray:
        """Harmonic extension of the edge data at interior sites."""
        index = sites - self._lower - 1
        return self._base[index[:, 0], index[:, 1]]

    def green(self, x_sites: np.ndarray, y_sites: np.ndarray) -> np.ndarray:
        """Dirichlet Green's function :math:`G(x, y)` of the box, shape ``(len(x), len(y))``."""
        rows, columns = self._shape
        ax, ay = x_sites - self._lower, y_sites - self._lower
        sx, sy = self._sines[:, ax[:, 0] - 1], self._sines[:, ay[:, 0] - 1]
        result = np.empty((len(x_sites), len(y_sites)))
        block = max(1, 4_000_000 // max(1, rows * len(y_sites)))
        mu = self._mu[:, None, None]
        for start in range(0, len(x_sites), block):
            stop = min(start + block, len(x_sites))
            low = np.minimum(ax[start:stop, 1, None], ay[None, :, 1])
            high = np.maximum(ax[start:stop, 1, None], ay[None, :, 1])
            kernel = (
                np.exp(-mu * (high - low)[None])
                * -np.expm1(-2.0 * mu * low[None])
                * -np.expm1(-2.0 * mu * (columns + 1 - high)[None])
                / self._denominator[:, None, None]
            )
            result[start:stop] = np.einsum("pi,pj,pij->ij", sx[:, start:stop], sy, kernel)
        return result

    @property
    def sites(self) -> np.ndarray:
        return self._sites[: self._count]

    def add(self, sites: np.ndarray) -> None:
        if len(sites) == 0:
            return
        sites = np.asarray(sites, dtype=np.int64).reshape(-1, 2)
        if np.any(sites <= self._lower) or np.any(sites >= self._upper):
            raise ParameterError("Site outside the box interior.")
        total = self._count + len(sites)
        if total > len(self._matrix):
            capacity = max(total, 2 * len(self._matrix), 64)
            matrix = np.zeros((capacity, capacity))
            matrix[: self._count, : self._count] = self._matrix[: self._count, : self._count]
            stored = np.zeros((capacity, 2), dtype=np.int64)
            stored[: self._count] = self._sites[: self._count]
            self._matrix, self._sites = matrix, stored
        self._sites[self._count : total] = sites
        rows = self.green(sites, self._sites[:total])
        self._matrix[self._count : total, :total] = rows
        self._matrix[:total, self._count : total] = rows.T
        self._count = total

    def remove(self, site: Site) -> None:
        matches = np.nonzero(np.all(self._sites[: self._count] == np.asarray(site), axis=1))[0]
        if len(matches) == 0:
            raise ParameterError(f"Site {site} is not a boundary site.")
        index, last = int(matches[0]), self._count - 1
        if index != last:
            self._sites[index] = self._sites[last]
            self._matrix[index, :] = self._matrix[last, :]
            self._matrix[:, index] = self._matrix[:, last]
            self._matrix[index, index] = self._matrix[last, last]
        self._count = last

    def charges(self, tol: float = FIELD_TOLERANCE) -> Tuple[np.ndarray, np.ndarray]:
        """
        Solve for the boundary sources.

        :return: Sites in lexicographic order and their normalized charges.
        :raises NumericError: If the capacitance residual exceeds ``tol``.
        """
        count = self._count
        matrix = self._matrix[:count, :count]
        rhs = -self.base_field(self.sites)
        sources = linalg.solve(matrix, rhs, assume_a="pos", check_finite=False)
        residual = float(np.max(np.abs(matrix @ sources - rhs)))
        if residual > tol:
            raise NumericError("Capacitance system did not converge.").with_note(f"residual: {residual:.3e}")
        order = np.lexsort((self.sites[:, 1], self.sites[:, 0]))
        return self.sites[order].copy(), _normalize_charges(sources[order])


def exact_charges(
    cluster: LatticeCluster,
    box_radius: Optional[int] = None,
    centre: Optional[Tuple[float, float]] = None,
) -> LatticeCluster:
    """
    Charges of a cluster computed with :py:class:`~.CapacitanceSolver`.
    Agrees with :py:func:`~.dla_charges` on the same box.

    :param centre: Centre of the box and of the far field; defaults to :py:func:`~.box_centre`,
        so the charges share every symmetry of the cluster.
    """
    box_radius = default_box_radius(cluster.radius) if box_radius is None else int(box_radius)
    centre = box_centre(cluster) if centre is None else (float(centre[0]), float(centre[1]))
    _check_box(cluster, box_radius, centre)
    solver = CapacitanceSolver(box_radius, centre)
    solver.add(cluster.boundary)
    sites, charges = solver.charges()
    return cluster.with_charges(charges)


class _ExactGrowth:
    def __init__(self, max_box_radius: int):
        self.max_box_radius = max_box_radius
        self.occupied: Set[Site] = {(0, 0)}
        self.order: List[Site] = [(0, 0)]
        self.boundary: Set[Site] = set(neighbors((0, 0)))
        self.radius = 0.0
        self.solver = self._solver(default_box_radius(0.0))

    def _solver(self, box_radius: int) -> CapacitanceSolver:
        if box_radius > self.max_box_radius:
            raise NumericError(f"Box exhaustion: half-width {box_radius} exceeds {self.max_box_radius}.")
        sites = np.array(self.order)
        low, high = sites.min(axis=0), sites.max(axis=0)
        centre = (float(low[0] + high[0]) / 2.0, float(low[1] + high[1]) / 2.0)
        logger.debug(f"Rebuilding capacitance matrix on box {box_radius} around {centre} ({len(self.boundary)} sites)")
        solver = CapacitanceSolver(box_radius, centre)
        solver.add(sorted_sites(self.boundary))
        return solver

    def attach(self, site: Site) -> None:
        self.occupied.add(site)
        self.order.append(site)
        self.boundary.discard(site)
        fresh = [nbr for nbr in neighbors(site) if nbr not in self.occupied and nbr not in self.boundary]
        self.boundary.update(fresh)
        self.radius = max(self.radius, math.hypot(*site))
        if BOX_FACTOR * (self.radius + 1.0) > self.solver.box_radius:
            self.solver = self._solver(int(math.ceil(BOX_GROWTH * BOX_FACTOR * (self.radius + 1.0))))
        else:
            self.solver.remove(site)
            self.solver.add(sorted_sites(fresh))


def _grow_exact(n_particles: int, rng: np.random.Generator, max_box_radius: int):
    state = _ExactGrowth(max_box_radius)
    worst = 0.0
    sites, charges = state.solver.charges()
    for _ in range(1, n_particles):
        worst = max(worst, abs(float(np.sum(charges)) - 1.0))
        choice = int(rng.choice(len(charges), p=charges))
        state.attach((int(sites[choice, 0]), int(sites[choice, 1])))
        sites, charges = state.solver.charges()
    worst = max(worst, abs(float(np.sum(charges)) - 1.0))
    cluster = LatticeCluster.from_sites(state.order, charges=charges)
    diagnostics = {
        "max_charge_sum_error": worst,
        "box_radius": float(state.solver.box_radius),
        "box_centre_m": state.solver.centre[0],
        "box_centre_n": state.solver.centre[1],
    }
    return cluster, diagnostics


class _StickyGrid:
    """Occupancy and sticky-site lookup arrays centred at the origin."""

    def __init__(self, half_width: int, occupied: Set[Site]):
        self.half_width = half_width
        size = 2 * half_width + 1
        self.occupied = np.zeros((size, size), dtype=bool)
        self.sticky = np.zeros((size, size), dtype=bool)
        for site in occupied:
            self.mark(site)

    def mark(self, site: Site) -> None:
        h = self.half_width
        self.occupied[site[0] + h, site[1] + h] = True
        self.sticky[site[0] + h, site[1] + h] = False
        for m, n in neighbors(site):
            if not self.occupied[m + h, n + h]:
                self.sticky[m + h, n + h] = True

    def first_hit(self, path: np.ndarray) -> int:
        """Index of the first sticky site on a path, or -1."""
        h = self.half_width
        inside = np.all(np.abs(path) <= h, axis=1)
        clipped = np.clip(path, -h, h) + h
        hits = inside & self.sticky[clipped[:, 0], clipped[:, 1]]
        return int(np.argmax(hits)) if hits.any() else -1


def _grow_walkers(
    n_particles: int,
    rng: np.random.Generator,
    launch_margin: float,
    kill_factor: float,
    chunk: int,
    max_box_radius: int,
):
    occupied: Set[Site] = {(0, 0)}
    order: List[Site] = [(0, 0)]
    radius = 0.0
    grid = _StickyGrid(32, occupied)
    relaunches = 0
    for _ in range(1, n_particles):
        launch = radius + launch_margin
        kill_squared = (kill_factor * launch) ** 2

        def release() -> np.ndarray:
            theta = rng.uniform(0.0, 2.0 * math.pi)
            return np.array([round(launch * math.cos(theta)), round(launch * math.sin(theta))], dtype=np.int64)

        position = release()
        while True:
            distance = math.hypot(*position)
            length = int(min(1 << 18, max(chunk, (distance - radius) ** 2 / 4.0)))
            path = position + np.cumsum(_OFFSETS[rng.integers(0, 4, size=length)], axis=0)
            hit = grid.first_hit(path)
            escaped = np.nonzero(np.sum(path.astype(np.float64) ** 2, axis=1) > kill_squared)[0]
            if hit >= 0 and (len(escaped) == 0 or hit < escaped[0]):
                site = (int(path[hit, 0]), int(path[hit, 1]))
                break
            if len(escaped):
                relaunches += 1
                position = release()
            else:
                position = path[-1]
        occupied.add(site)
        order.append(site)
        radius = max(radius, math.hypot(*site))
        if radius + launch_margin + 2 > grid.half_width:
            half_width = 2 * grid.half_width
            if half_width > max_box_radius:
                raise NumericError(f"Box exhaustion: lookup half-width {half_width} exceeds {max_box_radius}.")
            grid = _StickyGrid(half_width, occupied)
        else:
            grid.mark(site)
    logger.debug(f"Walker growth finished with {relaunches} re-injections")
    return LatticeCluster.from_sites(order), {"relaunches": float(relaunches)}


def dla_grow(
    n_particles: int,
    seed: RngSeed,
    mode: Literal["exact_charges", "random_walker"] = "exact_charges",
    *,
    launch_margin: float = 5.0,
    kill_factor: float = 100.0,
    chunk: int = 1024,
    max_box_radius: int = MAX_BOX_RADIUS,
) -> GrowthRun:
    """
    Grow a DLA cluster from the seed site :math:`(0, 0)`.

    :param n_particles: Final number of occupied sites.
    :param seed: RNG stream of the run.
    :param mode: ``exact_charges`` samples each new site from the boundary charges;
        ``random_walker`` releases walkers on a circle of radius :math:`R + ` ``launch_margin``
        and re-injects those that wander beyond ``kill_factor`` times the launch radius.
    :raises ParameterError: If ``n_particles < 1`` or the mode is unknown.
    :raises NumericError: On box exhaustion or a charge normalization failure.
    """
    if n_particles < 1:
        raise ParameterError(f"At least one particle is required, got {n_particles}.")
    rng = seed.generator()
    if mode == "exact_charges":
        cluster, diagnostics = _grow_exact(n_particles, rng, max_box_radius)
    elif mode == "random_walker":
        cluster, diagnostics = _grow_walkers(n_particles, rng, launch_margin, kill_factor, chunk, max_box_radius)
    else:
        raise ParameterError(f"Unknown DLA mode {mode!r}.")
    logger.info(f"Grew DLA cluster of {cluster.step} sites ({mode}), radius {cluster.radius:.1f}")
    params: Dict[str, object] = {"model": "dla", "n_particles": n_particles, "mode": mode}
    return GrowthRun(cluster=cluster, params=params, seed=seed, diagnostics=diagnostics)
