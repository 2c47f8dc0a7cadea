"""
Metropolis
----------
Single-particle Metropolis sampling of :math:`e^{-E}`.

A sweep proposes one Gaussian move :math:`z_i \\to z_i + s(\\xi + i\\xi')` for every particle in turn.
Energy differences are computed in :math:`O(N)` per move and accumulated in a cache which is
checked against a full recomputation every :py:data:`REFRESH_INTERVAL` sweeps.
During burn-in the proposal scale ``s`` is tuned towards 30--50% acceptance; it is frozen afterwards.
"""

import logging
import math
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator
from tqdm import tqdm

from loewner_forge.core.errors import ArtifactError, NumericError, ParameterError
from loewner_forge.coulomb_gas.state import CACHE_TOLERANCE, GasState, confinement, forbidden, pair_row
from loewner_forge.drivers.seed import RngSeed
from loewner_forge.utils.devel import ComplexArray, IntArray, RealArray
from loewner_forge.utils.io import read_csv, write_csv

logger = logging.getLogger(__name__)

REFRESH_INTERVAL = 100
"""Sweeps between full energy recomputations."""
TUNING_WINDOW = 10
"""Burn-in sweeps per proposal-scale adjustment."""
TARGET_ACCEPTANCE = (0.3, 0.5)
LOW_ACCEPTANCE = 0.01
"""Production acceptance below this is reported as pathological."""


class GasChain(BaseModel):
    """
    Recorded snapshots of a Metropolis run.

    Row ``j`` of :py:attr:`positions` is the configuration after sweep ``sweeps[j]``.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    state: GasState
    """The initial state; it also carries the energy parameters of the chain."""
    sweeps: IntArray
    positions: ComplexArray
    energies: RealArray
    acceptance: float = Field(ge=0.0, le=1.0)
    """Fraction of accepted moves after burn-in."""
    proposal_scale: float = Field(gt=0)
    """Proposal scale used after burn-in."""
    seed: Optional[RngSeed] = None
    diagnostics: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_chain(self):
        if self.positions.ndim != 2 or self.positions.shape != (len(self.sweeps), self.state.N):
            raise ValueError("Chain positions must have one row of N points per recorded sweep.")
        if len(self.energies) != len(self.sweeps):
            raise ValueError("Chain needs one energy per recorded sweep.")
        return self

    def __len__(self) -> int:
        return len(self.sweeps)

    @property
    def N(self) -> int:
        return self.state.N

    @property
    def final(self) -> GasState:
        return self.snapshot(-1)

    def snapshot(self, index: int) -> GasState:
        return self.state.with_positions(self.positions[index], float(self.energies[index]))

    def equilibrated(self) -> np.ndarray:
        """Snapshots of the second half of the chain."""
        return self.positions[len(self) // 2 :]

    def to_frame(self) -> pd.DataFrame:
        """Long table with columns ``sweep, i, x, y``."""
        S, N = self.positions.shape
        return pd.DataFrame(
            {
                "sweep": np.repeat(self.sweeps, N),
                "i": np.tile(np.arange(N), S),
                "x": self.positions.real.ravel(),
                "y": self.positions.imag.ravel(),
            }
        )

    def dump_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        write_csv(self.to_frame(), path)
        return path

    @classmethod
    def load_csv(cls, path: Union[str, Path], state: GasState) -> "GasChain":
        """
        Read a chain dump. Energies are recomputed; acceptance information is not stored in the dump.

        :param state: A state carrying the energy parameters of the chain.
        :raises ArtifactError: If the file is missing or malformed.
        """
        path = Path(path)
        if not path.is_file():
            raise ArtifactError(f"Chain file {path} does not exist.")
        frame = read_csv(path)
        if list(frame.columns) != ["sweep", "i", "x", "y"]:
            raise ArtifactError(f"Chain file {path} must have columns sweep, i, x, y.")
        frame = frame.sort_values(["sweep", "i"])
        sweeps = frame["sweep"].unique()
        if len(frame) != len(sweeps) * state.N:
            raise ArtifactError(f"Chain file {path} does not hold {state.N} points per sweep.")
        positions = (frame["x"].to_numpy() + 1j * frame["y"].to_numpy()).reshape(len(sweeps), state.N)
        energies = [state.with_positions(row).energy_cache for row in positions]
        return cls(
            state=state.with_positions(positions[0]),
            sweeps=sweeps,
            positions=positions,
            energies=energies,
            acceptance=0.0,
            proposal_scale=1.0,
        )


class _Sampler:
    def __init__(self, state: GasState, rng: np.random.Generator):
        self.state = state
        self.rng = rng
        self.z = np.array(state.positions, dtype=np.complex128)
        self.energy = state.recompute()
        self.max_drift = 0.0

    def move_energy(self, index: int, point: complex) -> float:
        state = self.state
        coeffs = state.potential_coeffs
        return pair_row(self.z, index, point, state.kernel) + float(confinement(point, state.hbar, coeffs))

    def sweep(self, scale: float) -> int:
        state = self.state
        N = len(self.z)
        steps = scale * (self.rng.normal(size=N) + 1j * self.rng.normal(size=N))
        thresholds = np.log(self.rng.uniform(size=N))
        accepted = 0
        for i in range(N):
            point = complex(self.z[i] + steps[i])
            if forbidden(point, state.kernel, state.sampling_radius):
                continue
            delta = self.move_energy(i, point) - self.move_energy(i, complex(self.z[i]))
            if delta <= 0 or thresholds[i] < -delta:
                self.z[i] = point
                self.energy += delta
                accepted += 1
        return accepted

    def refresh(self) -> None:
        exact = self.state.with_positions(self.z).energy_cache
        drift = abs(self.energy - exact)
        self.max_drift = max(self.max_drift, drift)
        if drift > CACHE_TOLERANCE * max(1.0, abs(exact)):
            raise NumericError(
                "Incremental energy drifted away from the recomputed energy.",
                notes=[f"cached={self.energy!r}", f"exact={exact!r}"],
            )
        self.energy = exact


def _tuned(scale: float, acceptance: float) -> float:
    low, high = TARGET_ACCEPTANCE
    if acceptance < low:
        return scale * 0.8
    if acceptance > high:
        return scale * 1.25
    return scale


def metropolis_run(
    state: GasState,
    sweeps: int,
    proposal_scale: Optional[float] = None,
    seed: RngSeed = RngSeed(),
    *,
    burn_in: int = 0,
    thin: int = 1,
    progress: bool = False,
) -> GasChain:
    """
    Sample :math:`e^{-E}` starting from ``state``.

    :param sweeps: Production sweeps after burn-in.
    :param proposal_scale: Initial proposal standard deviation per coordinate;
        defaults to :math:`\\sqrt{\\hbar}/2`.
    :param burn_in: Unrecorded sweeps during which the proposal scale is tuned.
    :param thin: Record every ``thin``-th production sweep.
    :raises ParameterError: If ``thin`` is not in ``1..sweeps`` or the initial state is forbidden.
    :raises NumericError: If the energy cache drifts beyond tolerance.
    """
    if sweeps < 1 or not 1 <= thin <= sweeps or burn_in < 0:
        raise ParameterError(f"Need sweeps >= thin >= 1 and burn_in >= 0, got {sweeps}, {thin}, {burn_in}.")
    if not math.isfinite(state.recompute()):
        raise ParameterError("The initial configuration has infinite energy.")
    scale = proposal_scale if proposal_scale is not None else math.sqrt(state.hbar) / 2.0
    if not scale > 0:
        raise ParameterError(f"Proposal scale must be positive, got {scale}.")
    sampler = _Sampler(state, seed.generator())
    N = state.N

    window = 0
    for sweep in range(1, burn_in + 1):
        window += sampler.sweep(scale)
        if sweep % TUNING_WINDOW == 0:
            scale = _tuned(scale, window / (TUNING_WINDOW * N))
            window = 0
        if sweep % REFRESH_INTERVAL == 0:
            sampler.refresh()
    if burn_in:
        sampler.refresh()
        logger.debug(f"Burn-in finished after {burn_in} sweeps, proposal scale frozen at {scale:.4g}")

    recorded_sweeps, recorded, energies = [], [], []
    accepted = 0
    for sweep in tqdm(range(1, sweeps + 1), desc="metropolis", disable=not progress):
        accepted += sampler.sweep(scale)
        if sweep % REFRESH_INTERVAL == 0 or sweep == sweeps:
            sampler.refresh()
        if sweep % thin == 0:
            recorded_sweeps.append(burn_in + sweep)
            recorded.append(sampler.z.copy())
            energies.append(sampler.energy)

    acceptance = accepted / (sweeps * N)
    diagnostics = {"cache_drift": sampler.max_drift, "burn_in": float(burn_in)}
    if acceptance < LOW_ACCEPTANCE:
        logger.warning(f"Metropolis acceptance {acceptance:.2%} is pathologically low (scale {scale:.3g})")
        diagnostics["low_acceptance"] = 1.0
    logger.info(f"Metropolis run of {N} particles for {sweeps} sweeps: acceptance {acceptance:.3f}")
    return GasChain(
        state=state,
        sweeps=np.asarray(recorded_sweeps, dtype=np.int64),
        positions=np.array(recorded, dtype=np.complex128).reshape(len(recorded), N),
        energies=energies,
        acceptance=acceptance,
        proposal_scale=scale,
        seed=seed,
        diagnostics=diagnostics,
    )
