"""
String Evolution
----------------
Time stepping of truncated Laurent maps under the Polubarinova--Kochina (dispersionless string)
equation :math:`\\{f, \\bar f\\} = q(t)`.

At every stage the velocity :math:`\\dot f` is the unique solution of a square real linear
system: the Fourier modes :math:`0, \\dots, K+1` of the bracket are matched against the source
rate. The system is solved by least squares on :math:`8(K+1)` equispaced circle points,
which resolve every mode exactly. Steps use Heun's second order scheme and are halved
whenever one full step and two half steps disagree or the end state loses univalence.
"""

import logging
import math
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator
from tqdm import tqdm

from loewner_forge.core.errors import (
    ArtifactError,
    CuspError,
    DomainError,
    NumericError,
    ParameterError,
    SingularityError,
)
from loewner_forge.hele_shaw.laurent import (
    LaurentMap,
    MapVelocity,
    Orientation,
    circle_points,
    cusp_ratio,
    is_univalent,
    map_area,
)
from loewner_forge.utils.devel import RealArray
from loewner_forge.utils.io import read_csv, write_csv

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12
CUSP_THRESHOLD = 0.05
MAX_HALVINGS = 20


class FluxProfile(BaseModel):
    """
    Source rate :math:`q(t)`.

    - ``constant``: :math:`q = \\mathrm{rate}`;
    - ``linear``: :math:`q = \\mathrm{rate} + \\mathrm{slope} \\cdot t`;
    - ``sinusoidal``: :math:`q = \\mathrm{rate} (1 + \\mathrm{amplitude} \\sin(2\\pi t / \\mathrm{period}))`.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["constant", "linear", "sinusoidal"] = "constant"
    rate: float = 1.0
    slope: float = 0.0
    amplitude: float = 0.0
    period: float = 1.0

    @model_validator(mode="after")
    def validate_profile(self):
        if self.kind == "sinusoidal" and not self.period > 0:
            raise ValueError("Sinusoidal flux needs a positive period.")
        return self

    def __call__(self, t: float) -> float:
        if self.kind == "linear":
            return self.rate + self.slope * t
        if self.kind == "sinusoidal":
            return self.rate * (1.0 + self.amplitude * math.sin(2 * math.pi * t / self.period))
        return self.rate

    def total(self, t0: float, t1: float) -> float:
        """:math:`\\int_{t_0}^{t_1} q(t) dt`."""
        if self.kind == "linear":
            return self.rate * (t1 - t0) + 0.5 * self.slope * (t1**2 - t0**2)
        if self.kind == "sinusoidal":
            omega = 2 * math.pi / self.period
            return self.rate * ((t1 - t0) - self.amplitude * (math.cos(omega * t1) - math.cos(omega * t0)) / omega)
        return self.rate * (t1 - t0)

    def is_contracting(self, t0: float, t1: float) -> bool:
        """Whether the rate is negative anywhere on ``[t0, t1]``."""
        if self.kind == "linear":
            return min(self(t0), self(t1)) < 0
        if self.kind == "sinusoidal":
            return self.rate * (1 - abs(self.amplitude)) < 0 or self.rate < 0
        return self.rate < 0


def velocity_system(f: LaurentMap, n_theta: Optional[int] = None) -> np.ndarray:
    """
    Real matrix mapping the velocity unknowns :math:`(\\dot r, \\Re \\dot u_j, \\Im \\dot u_j)`
    to the bracket :math:`2\\Re(\\dot f \\, \\overline{w f_w})` on the circle.
    """
    n_theta = n_theta or 8 * (f.K + 1)
    w = circle_points(n_theta)
    reflected = np.conj(w * f.derivative(w))
    basis = [w]
    for power in f.powers:
        monomial = w**power
        basis.extend([monomial, 1j * monomial])
    return np.column_stack([2.0 * np.real(item * reflected) for item in basis])


def solve_velocity(f: LaurentMap, rate: float = 1.0) -> MapVelocity:
    """
    The velocity with :math:`\\{f, \\bar f\\} = q`.

    :raises SingularityError: If the system's condition number exceeds :math:`10^{12}`.
    """
    matrix = velocity_system(f)
    condition = float(np.linalg.cond(matrix))
    if not condition < CONDITION_LIMIT:
        raise SingularityError("Velocity system is singular.", notes=[f"condition number {condition:.3e}"])
    solution, *_ = np.linalg.lstsq(matrix, np.full(matrix.shape[0], float(rate)), rcond=None)
    return MapVelocity(
        r_dot=float(solution[0]),
        coeff_dots=solution[1::2] + 1j * solution[2::2],
        orientation=f.orientation,
    )


class Trajectory(BaseModel):
    """The accepted states of a string-equation evolution, one per time step."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: RealArray
    maps: Tuple[LaurentMap, ...]
    flux: FluxProfile = FluxProfile()

    @model_validator(mode="after")
    def validate_trajectory(self):
        if len(self.times) != len(self.maps) or len(self.maps) == 0:
            raise ValueError("A trajectory needs one time per map and at least one map.")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("Trajectory times must increase.")
        return self

    @property
    def orientation(self) -> Orientation:
        return self.maps[0].orientation

    @property
    def final(self) -> LaurentMap:
        return self.maps[-1]

    def areas(self) -> np.ndarray:
        return np.array([map_area(f) for f in self.maps])

    def to_frame(self) -> pd.DataFrame:
        """Columns ``t, r`` then ``re_u{k}, im_u{k}`` for every coefficient, keyed by its index."""
        first = self.maps[0]
        labels = [0, *range(2, first.K + 2)] if first.orientation == "interior" else list(range(first.K + 1))
        columns = {"t": self.times, "r": np.array([f.r for f in self.maps])}
        coeffs = np.array([f.coeffs for f in self.maps])
        for position, label in enumerate(labels):
            columns[f"re_u{label}"] = coeffs[:, position].real
            columns[f"im_u{label}"] = coeffs[:, position].imag
        return pd.DataFrame(columns)

    def dump_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        write_csv(self.to_frame(), path)
        return path

    @classmethod
    def load_csv(
        cls, path: Union[str, Path], orientation: Orientation = "exterior", flux: Optional[FluxProfile] = None
    ) -> "Trajectory":
        """
        Read a dump written by :py:meth:`dump_csv`.

        :param orientation: Orientation of the dumped maps; it is not stored in the file.
        :raises ArtifactError: If the file is missing, lacks columns or holds an invalid row;
            the row number is attached as a note.
        """
        path = Path(path)
        if not path.is_file():
            raise ArtifactError(f"Trajectory file {path} does not exist.")
        frame = read_csv(path)
        labels = sorted(int(column[4:]) for column in frame.columns if column.startswith("re_u"))
        expected = ["t", "r", *(f"{part}_u{label}" for label in labels for part in ("re", "im"))]
        if not labels or sorted(frame.columns) != sorted(expected):
            raise ArtifactError(f"Trajectory file {path} must have columns t, r and re_u/im_u pairs.")
        coeffs = np.stack([frame[f"re_u{label}"] + 1j * frame[f"im_u{label}"] for label in labels], axis=1)
        maps = []
        for row, (r, values) in enumerate(zip(frame["r"].to_numpy(), coeffs)):
            try:
                maps.append(LaurentMap(r=r, coeffs=values, orientation=orientation))
            except ValidationError as exc:
                raise ArtifactError(f"Trajectory file {path} holds an invalid map.", notes=[f"row: {row}"]) from exc
        try:
            return cls(times=frame["t"].to_numpy(), maps=tuple(maps), flux=flux or FluxProfile())
        except ValidationError as exc:
            raise ArtifactError(f"Trajectory file {path} does not hold increasing times.") from exc


def _heun_step(f: LaurentMap, velocity: MapVelocity, t: float, dt: float, flux: FluxProfile) -> LaurentMap:
    predicted = f.advanced(velocity, dt)
    corrected = solve_velocity(predicted, flux(t + dt))
    return f.advanced(velocity.combined(corrected), dt)


def _step_error(full: LaurentMap, refined: LaurentMap) -> float:
    """Largest coefficient gap between one full step and two half steps, relative to the conformal radius."""
    gap = max(abs(full.r - refined.r), float(np.max(np.abs(full.coeffs - refined.coeffs), initial=0.0)))
    return gap / max(1.0, abs(refined.r))


def evolve_string(
    f: LaurentMap,
    dt: float,
    steps: int,
    flux: Optional[FluxProfile] = None,
    tol: float = 1e-8,
    unsafe: bool = False,
    cusp_threshold: float = CUSP_THRESHOLD,
    check_univalence: bool = True,
    progress: bool = False,
) -> Trajectory:
    """
    Integrate :math:`\\{f, \\bar f\\} = q(t)` from ``t = 0`` for ``steps`` steps of size ``dt``.

    Each step is taken as two Heun half steps and compared with one full step; when the two differ
    by more than ``tol`` (relative to the conformal radius) or the end state is not univalent, the
    step is retried with half the size, at most 20 times.

    :param flux: Source rate profile, unit rate by default.
    :param unsafe: Allow negative rates (contraction), which is ill-posed.
    :param cusp_threshold: Halt once :math:`\\min|f_w| / r` drops below this value.
    :raises ParameterError: On invalid step parameters or a contracting flux without ``unsafe``.
    :raises DomainError: If the initial map is not univalent.
    :raises CuspError: When a cusp is approached or the velocity system becomes singular;
        ``trajectory`` holds the states accepted so far.
    :raises NumericError: If step halving is exhausted; ``partial`` holds the states accepted so far.
    """
    flux = flux or FluxProfile()
    if not (dt > 0 and math.isfinite(dt)) or steps < 0:
        raise ParameterError(f"Evolution needs dt > 0 and steps >= 0, got dt={dt}, steps={steps}.")
    if flux.is_contracting(0.0, dt * steps) and not unsafe:
        raise ParameterError("Contracting flux makes the evolution ill-posed; pass unsafe=True to proceed.")
    if check_univalence and not is_univalent(f):
        raise DomainError("Initial map is not univalent.")

    times: List[float] = [0.0]
    maps: List[LaurentMap] = [f]

    def partial() -> Trajectory:
        return Trajectory(times=times, maps=tuple(maps), flux=flux)

    t = 0.0
    for step in tqdm(range(steps), desc="string evolution", disable=not progress):
        remaining, sub, halvings = dt, dt, 0
        while remaining > 0:
            ratio = cusp_ratio(f)
            if ratio < cusp_threshold:
                logger.warning(f"Cusp approached at t={t:.6g}: min|f_w|/r = {ratio:.3g}")
                raise CuspError(
                    "Boundary approaches a cusp.", trajectory=partial(), notes=[f"t={t!r}", f"min|f_w|/r={ratio!r}"]
                )
            try:
                velocity = solve_velocity(f, flux(t))
                full = _heun_step(f, velocity, t, sub, flux)
                half = _heun_step(f, velocity, t, sub / 2, flux)
                candidate = _heun_step(half, solve_velocity(half, flux(t + sub / 2)), t + sub / 2, sub / 2, flux)
                error = _step_error(full, candidate)
            except SingularityError as exc:
                raise CuspError(
                    "Velocity system became singular.", trajectory=partial(), notes=getattr(exc, "__notes__", [])
                ) from exc
            except ValidationError:
                error = math.inf
            accepted = error <= tol and (not check_univalence or is_univalent(candidate))
            if not accepted:
                halvings += 1
                if halvings > MAX_HALVINGS:
                    raise NumericError(
                        "Step halving exhausted.", partial=partial(), notes=[f"t={t!r}", f"step error={error!r}"]
                    )
                logger.debug(f"Rejected step at t={t:.6g} (step error {error:.3e}); halving to {sub / 2:.3e}")
                sub /= 2
                continue
            f, t = candidate, t + sub
            remaining -= sub
            sub = min(sub, remaining) if remaining > 1e-15 * dt else 0.0
            if sub == 0.0:
                remaining = 0.0
        t = (step + 1) * dt
        times.append(t)
        maps.append(f)
    logger.info(f"String evolution finished {steps} steps; area {map_area(f):.6g}")
    return partial()
