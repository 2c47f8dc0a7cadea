"""
Run Configuration
-----------------
Loading and validation of run configurations.

A configuration is an OmegaConf document (usually YAML) with the top-level keys
``seed``, ``stream``, ``workers``, ``out`` and ``emit`` and one section per command:

.. code:: yaml

    seed: 1
    emit: [csv, json]
    grow-hl:
      alpha: 0
      delta_a: 0.001
      n: 100

Dotlist overrides (``grow-hl.n=200``) are merged on top of the file and command line flags
on top of both. Every parameter is validated before any work starts.
"""

import logging
import math
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Literal, Optional, Sequence, Tuple, Type, Union, get_args

from omegaconf import OmegaConf
from omegaconf.errors import OmegaConfBaseException
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from loewner_forge.core.errors import ConfigError
from loewner_forge.drivers.seed import UINT64_MAX, RngSeed
from loewner_forge.growth.loewner import MIN_BURN_IN
from loewner_forge.hele_shaw.evolution import FluxProfile
from loewner_forge.multifractal.integral_means import MIN_ANGLES, check_eps_grid

logger = logging.getLogger(__name__)

CommandName = Literal["grow-hl", "grow-dla", "grow-sle", "grow-lle", "hele-shaw", "coulomb", "tau", "spectrum"]
EmitFormat = Literal["csv", "json", "svg"]

COMMANDS: Tuple[str, ...] = get_args(CommandName)
RUN_KEYS = ("seed", "stream", "workers", "out", "emit")
DEFAULT_EMIT = ("csv", "json", "svg")

ComplexPair = Tuple[float, float]
"""A complex number written as ``[re, im]``; OmegaConf has no complex type."""


def as_complex(pairs: Sequence[ComplexPair]) -> List[complex]:
    return [complex(re, im) for re, im in pairs]


class CommandParams(BaseModel):
    """Base of the per-command parameter tables; unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid", frozen=True)


class GrowHLParams(CommandParams):
    alpha: float = 0.0
    """Exponent of the derivative in the capacity rule."""
    delta_a: float = Field(default=1e-3, gt=0)
    n: int = Field(default=100, ge=1)
    regularization: Optional[float] = Field(default=None, gt=0)
    trace_points: int = Field(default=2048, ge=16)
    """Boundary samples of the rendered trace."""


class GrowDLAParams(CommandParams):
    n: int = Field(default=500, ge=1)
    mode: Literal["exact_charges", "random_walker"] = "exact_charges"
    tau_q: List[float] = Field(default_factory=list)
    """Moment orders of the box-counting spectrum; empty to skip it. Needs charges."""

    @model_validator(mode="after")
    def validate_spectrum(self):
        if self.tau_q and self.mode != "exact_charges":
            raise ValueError("The charge spectrum needs mode exact_charges.")
        return self


class GrowSLEParams(CommandParams):
    kappa: float = Field(default=2.0, ge=0)
    t: float = Field(default=0.0, ge=0)
    """Whole-plane time of every member."""
    T_burn: float = Field(default=MIN_BURN_IN, ge=MIN_BURN_IN)
    dt: float = Field(default=1e-2, gt=0)
    ensemble: int = Field(default=1, ge=1)
    trace_points: int = Field(default=2048, ge=16)
    traces: int = Field(default=4, ge=0)
    """Number of members drawn in the rendered figure."""


class GrowLLEParams(GrowSLEParams):
    jump_rate: float = Field(default=1.0, gt=0)
    jump_scale: float = Field(default=math.pi / 2, gt=0)
    atoms: List[Tuple[float, float]] = Field(default_factory=list)
    """Further ``[size, rate]`` jump atoms."""


class HeleShawParams(CommandParams):
    orientation: Literal["exterior", "interior"] = "exterior"
    r: float = Field(default=1.0, gt=0)
    coeffs: List[ComplexPair] = Field(default_factory=list)
    """Exterior maps: :math:`u_0, \\dots, u_K`; interior maps: :math:`u_2, \\dots`."""
    source: ComplexPair = (0.0, 0.0)
    """Source point of an interior map."""
    dt: float = Field(default=1e-3, gt=0)
    steps: int = Field(default=1000, ge=0)
    flux: FluxProfile = FluxProfile()
    moments: int = Field(default=5, ge=1)
    tol: float = Field(default=1e-8, gt=0)
    unsafe: bool = False
    snapshots: int = Field(default=5, ge=1)
    """Number of boundaries drawn in the rendered figure."""

    @property
    def is_circle(self) -> bool:
        """Whether the initial domain is a disk."""
        extra = self.coeffs[1:] if self.orientation == "exterior" else self.coeffs
        return all(re == 0 and im == 0 for re, im in extra)


class CoulombParams(CommandParams):
    N: int = Field(default=64, ge=1)
    hbar: float = Field(default=0.02, gt=0)
    potential: List[ComplexPair] = Field(default_factory=list)
    """Harmonic couplings :math:`t_1, t_2, \\dots`."""
    kernel: Literal["coulomb", "kp"] = "coulomb"
    sampling_radius: Optional[float] = Field(default=None, gt=0)
    sweeps: int = Field(default=2000, ge=1)
    burn_in: int = Field(default=500, ge=0)
    thin: int = Field(default=10, ge=1)
    proposal_scale: Optional[float] = Field(default=None, gt=0)
    bins: int = Field(default=32, ge=1)
    sectors: int = Field(default=16, ge=3)

    @model_validator(mode="after")
    def validate_thinning(self):
        if self.thin > self.sweeps:
            raise ValueError(f"thin ({self.thin}) cannot exceed sweeps ({self.sweeps}).")
        return self


class TauParams(CommandParams):
    kind: Literal["hirota", "adler-moser"] = "hirota"
    momenta: List[float] = Field(default_factory=lambda: [1.0, 2.0], min_length=1)
    phases: Optional[List[float]] = None
    t3: float = 0.0
    x_min: float = -10.0
    x_max: float = 10.0
    points: int = Field(default=401, ge=2)
    level: int = Field(default=2, ge=0, le=12)
    am_params: List[str] = Field(default_factory=list)
    """:math:`t_3, \\dots, t_{2l-1}` as exact rationals, e.g. ``"1/2"``. All zero when empty."""

    @field_validator("am_params", mode="before")
    @classmethod
    def stringify_params(cls, value: Any) -> Any:
        if isinstance(value, (list, tuple)):
            return [str(item) for item in value]
        return value

    @model_validator(mode="after")
    def validate_window(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"x_min must be below x_max, got {self.x_min} and {self.x_max}.")
        if self.phases is not None and len(self.phases) != len(self.momenta):
            raise ValueError("Need one phase per momentum.")
        if self.am_params and len(self.am_params) != max(0, self.level - 1):
            raise ValueError(f"Level {self.level} takes {max(0, self.level - 1)} Adler-Moser parameters.")
        return self

    @property
    def am_times(self) -> List[str]:
        return self.am_params or ["0"] * max(0, self.level - 1)


class SpectrumParams(CommandParams):
    ensemble: Path
    """Manifest of a ``grow-sle``, ``grow-lle`` or ``grow-hl`` run."""
    q: List[float] = Field(default_factory=lambda: [-1.0, 0.0, 1.0, 2.0], min_length=1)
    eps: List[float] = Field(default_factory=lambda: [0.1, 0.03, 0.01], min_length=2)
    n_theta: int = Field(default=MIN_ANGLES, ge=MIN_ANGLES)
    bootstrap: int = Field(default=200, ge=0)
    unbounded: bool = False
    legendre: bool = True
    """Also emit the singularity spectrum of the estimated curve."""
    kappa: Optional[float] = Field(default=None, gt=0)
    """Compare with the exact SLE spectrum of this :math:`\\kappa`."""

    @field_validator("q")
    @classmethod
    def validate_q(cls, value: List[float]) -> List[float]:
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("Moment orders must be strictly increasing.")
        return value

    @field_validator("eps")
    @classmethod
    def validate_eps(cls, value: List[float]) -> List[float]:
        check_eps_grid(value)
        return value

    @field_validator("ensemble")
    @classmethod
    def validate_ensemble(cls, value: Path) -> Path:
        if not value.is_file():
            raise ValueError(f"Ensemble manifest {str(value)!r} does not exist.")
        return value


PARAMS: Dict[str, Type[CommandParams]] = {
    "grow-hl": GrowHLParams,
    "grow-dla": GrowDLAParams,
    "grow-sle": GrowSLEParams,
    "grow-lle": GrowLLEParams,
    "hele-shaw": HeleShawParams,
    "coulomb": CoulombParams,
    "tau": TauParams,
    "spectrum": SpectrumParams,
}


class RunOptions(BaseModel):
    """The top-level keys shared by all commands."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: int = Field(default=0, ge=0, le=UINT64_MAX)
    stream: int = Field(default=0, ge=0, le=UINT64_MAX)
    workers: Optional[int] = Field(default=None, ge=1)
    out: Optional[Path] = None
    emit: FrozenSet[EmitFormat] = frozenset(DEFAULT_EMIT)

    @field_validator("emit", mode="before")
    @classmethod
    def split_emit(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value


class RunConfig(BaseModel):
    """A validated run: the command, its parameters and where and what to emit."""

    model_config = ConfigDict(frozen=True)

    command: CommandName
    params: CommandParams
    seed: RngSeed = RngSeed()
    output_dir: Path
    emit: FrozenSet[EmitFormat] = frozenset(DEFAULT_EMIT)
    workers: Optional[int] = Field(default=None, ge=1)

    def echo(self) -> Dict[str, Any]:
        """The full configuration as plain data, for manifests."""
        return {
            "command": self.command,
            "params": self.params.model_dump(mode="json"),
            "seed": self.seed.seed,
            "stream": self.seed.stream,
            "workers": self.workers,
            "out": str(self.output_dir),
            "emit": sorted(self.emit),
        }


def _error_key(prefix: Optional[str], error: Dict[str, Any]) -> str:
    parts = [prefix] if prefix else []
    parts.extend(str(item) for item in error["loc"])
    return ".".join(parts)


def _validated(model: Type[BaseModel], data: Any, prefix: Optional[str]) -> BaseModel:
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        key = _error_key(prefix, first)
        raise ConfigError(f"Invalid configuration key {key!r}: {first['msg']}", key=key) from exc


def _load_document(file: Optional[Union[str, Path]], overrides: Sequence[str]):
    try:
        file_conf = OmegaConf.load(file) if file is not None else OmegaConf.create()
    except FileNotFoundError as exc:
        raise ConfigError(f"Configuration file {file} does not exist.", key="config") from exc
    except OmegaConfBaseException as exc:
        raise ConfigError(f"Configuration file {file} is malformed: {exc}", key="config") from exc
    try:
        cmd_conf = OmegaConf.from_dotlist(list(overrides))
        return OmegaConf.merge(file_conf, cmd_conf)
    except OmegaConfBaseException as exc:
        raise ConfigError(f"Invalid override: {exc}", key="set") from exc


def load_config(
    command: str,
    file: Optional[Union[str, Path]] = None,
    overrides: Sequence[str] = (),
    **flags: Any,
) -> RunConfig:
    """
    Build the configuration of one run.

    :param command: One of :py:data:`COMMANDS`.
    :param file: Optional OmegaConf/YAML document.
    :param overrides: Dotlist overrides such as ``grow-hl.alpha=2``.
    :param flags: Command line values of the top-level keys; ``None`` values are ignored.
    :raises ConfigError: Naming the offending key when the document does not validate.
    """
    if command not in PARAMS:
        raise ConfigError(f"Unknown command {command!r}.", key="command")
    document = _load_document(file, overrides)
    flag_conf = OmegaConf.create({key: value for key, value in flags.items() if value is not None})
    try:
        merged = OmegaConf.to_container(OmegaConf.merge(document, flag_conf), resolve=True)
    except OmegaConfBaseException as exc:
        raise ConfigError(f"Configuration does not resolve: {exc}", key="config") from exc
    if not isinstance(merged, dict):
        raise ConfigError("A configuration must be a mapping.", key="config")

    for key in merged:
        if key not in RUN_KEYS and key not in PARAMS:
            raise ConfigError(f"Unknown configuration key {key!r}.", key=str(key))
    options = _validated(RunOptions, {key: merged[key] for key in RUN_KEYS if key in merged}, None)
    section = merged.get(command) or {}
    params = _validated(PARAMS[command], section, command)

    config = RunConfig(
        command=command,
        params=params,
        seed=RngSeed(seed=options.seed, stream=options.stream),
        output_dir=options.out if options.out is not None else Path("runs") / command,
        emit=options.emit,
        workers=options.workers,
    )
    logger.debug(f"Loaded configuration for {command}: {config.echo()}")
    return config
