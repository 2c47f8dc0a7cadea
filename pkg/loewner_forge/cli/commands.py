"""
Commands
--------
One function per command. Each runs the experiment described by a validated
:py:class:`~loewner_forge.cli.config.RunConfig`, writes the artifacts selected by ``emit``
into the output directory and returns them together with run diagnostics.

Artifact names are fixed per command; :py:mod:`~loewner_forge.cli.verify` finds them by name.
"""

import logging
import math
import time
from functools import partial
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd

from loewner_forge import __version__
from loewner_forge.cli.config import (
    CoulombParams,
    GrowDLAParams,
    GrowHLParams,
    GrowLLEParams,
    GrowSLEParams,
    HeleShawParams,
    RunConfig,
    SpectrumParams,
    TauParams,
    as_complex,
)
from loewner_forge.cli.manifest import Manifest, checksum_mismatches
from loewner_forge.core.composite import CompositeMap
from loewner_forge.core.errors import ArtifactError, ConfigError, ParameterError
from loewner_forge.coulomb_gas import (
    boundary_estimate,
    circular_droplet,
    compare_to_hele_shaw,
    droplet_stats,
    initial_state,
    metropolis_run,
    predicted_droplet_radius,
)
from loewner_forge.drivers.seed import RngSeed
from loewner_forge.growth import GrowthRun, dla_grow, grow_hl, grow_whole_plane, load_map_csv, trace_points
from loewner_forge.hele_shaw import (
    LaurentMap,
    dump_moments_csv,
    evolve_string,
    exterior_map,
    interior_map,
    map_area,
    richardson_invariance,
)
from loewner_forge.hele_shaw.laurent import boundary_points
from loewner_forge.multifractal import beta_spectrum, exact_beta_curve, legendre_beta_to_f, tau_boxcount
from loewner_forge.tau_functions import SolitonData, adler_moser, kdv_potential, kdv_residual, log_tau
from loewner_forge.utils.io import write_csv, write_json
from loewner_forge.utils.parallel import run_ensemble
from loewner_forge.utils.rendering import render_curves, render_points, render_spectra

logger = logging.getLogger(__name__)

MAP_ENSEMBLE_KINDS = ("grow-hl", "grow-sle", "grow-lle")
RESIDUAL_SPACING = 0.01
"""Spacing of the KdV residual check, relative to the inverse largest momentum."""


class Emitter:
    """
    Writes artifacts of the formats selected by ``emit`` and remembers them.
    """

    def __init__(self, config: RunConfig):
        self.directory = config.output_dir
        self.emit = config.emit
        self.files: List[Path] = []
        self.directory.mkdir(parents=True, exist_ok=True)

    def _write(self, fmt: str, name: str, writer: Callable[[Path], Path]) -> None:
        if fmt in self.emit:
            self.files.append(writer(self.directory / name))

    def csv(self, name: str, writer: Callable[[Path], Path]) -> None:
        self._write("csv", name, writer)

    def frame(self, name: str, frame: pd.DataFrame) -> None:
        def writer(path: Path) -> Path:
            write_csv(frame, path)
            return path

        self.csv(name, writer)

    def json(self, name: str, data) -> None:
        self._write("json", name, lambda path: write_json(path, data))

    def svg(self, name: str, renderer: Callable[[Path], Path]) -> None:
        self._write("svg", name, renderer)


Outcome = Tuple[List[Path], Dict[str, float]]


def run_grow_hl(config: RunConfig) -> Outcome:
    params: GrowHLParams = config.params
    run = grow_hl(params.alpha, params.delta_a, params.n, config.seed, params.regularization)
    emitter = Emitter(config)
    emitter.csv("map.csv", run.dump_map_csv)
    emitter.csv("driver.csv", run.driver.dump_csv)
    diagnostics = {
        "slits": float(len(run.map)),
        "total_capacity": run.map.total_capacity,
        "leading_coefficient": run.map.leading_coefficient,
    }
    emitter.json("run.json", {"params": run.params, "diagnostics": diagnostics})
    emitter.svg(
        "trace.svg",
        lambda path: render_curves([trace_points(run.map, params.trace_points)], path, title=f"HL({params.alpha:g})"),
    )
    return emitter.files, diagnostics


def run_grow_dla(config: RunConfig) -> Outcome:
    params: GrowDLAParams = config.params
    run = dla_grow(params.n, config.seed, params.mode)
    cluster = run.cluster
    emitter = Emitter(config)
    emitter.csv("cluster.csv", cluster.dump_csv)
    if len(cluster.charges):
        charges = pd.DataFrame({"m": cluster.boundary[:, 0], "n": cluster.boundary[:, 1], "charge": cluster.charges})
        emitter.frame("charges.csv", charges)
    if params.tau_q:
        curve = tau_boxcount(cluster, params.tau_q)
        emitter.csv("tau.csv", curve.dump_csv)
    diagnostics = {**run.diagnostics, "sites": float(cluster.step), "radius": cluster.radius}
    emitter.json("run.json", {"params": run.params, "diagnostics": diagnostics})
    sites = cluster.sites[:, 0] + 1j * cluster.sites[:, 1]
    emitter.svg("cluster.svg", lambda path: render_points(sites, path, title=f"DLA, {cluster.step} sites"))
    return emitter.files, diagnostics


def whole_plane_member(
    index: int,
    *,
    kappa: float,
    t: float,
    T_burn: float,
    dt: float,
    seed: RngSeed,
    jump_rate: float = 0.0,
    jump_scale: float = 0.0,
    atoms: Sequence[Tuple[float, float]] = (),
) -> GrowthRun:
    """Member ``index`` of a whole-plane ensemble; it draws from stream ``index`` of ``seed``."""
    return grow_whole_plane(kappa, t, T_burn, dt, seed.member(index), jump_rate, jump_scale, atoms)


def _run_whole_plane(config: RunConfig, params: GrowSLEParams, **jumps) -> Outcome:
    member = partial(
        whole_plane_member,
        kappa=params.kappa,
        t=params.t,
        T_burn=params.T_burn,
        dt=params.dt,
        seed=config.seed,
        **jumps,
    )
    runs = run_ensemble(member, range(params.ensemble), config.workers, desc=config.command)
    emitter = Emitter(config)
    for index, run in enumerate(runs):
        emitter.csv(f"map_{index:04d}.csv", run.dump_map_csv)
        emitter.csv(f"driver_{index:04d}.csv", run.driver.dump_csv)
    leading = np.array([run.map.leading_coefficient for run in runs])
    diagnostics = {
        "members": float(len(runs)),
        "slits": float(len(runs[0].map)),
        "max_leading_error": float(np.max(np.abs(leading - math.exp(params.t)))),
    }
    emitter.json("run.json", {"params": runs[0].params, "diagnostics": diagnostics})
    shown = runs[: params.traces]
    if shown:
        emitter.svg(
            "trace.svg",
            lambda path: render_curves(
                [trace_points(run.map, params.trace_points) for run in shown], path, title=config.command
            ),
        )
    logger.info(f"{config.command}: grew {len(runs)} whole-plane maps of {len(runs[0].map)} slits")
    return emitter.files, diagnostics


def run_grow_sle(config: RunConfig) -> Outcome:
    return _run_whole_plane(config, config.params)


def run_grow_lle(config: RunConfig) -> Outcome:
    params: GrowLLEParams = config.params
    return _run_whole_plane(
        config, params, jump_rate=params.jump_rate, jump_scale=params.jump_scale, atoms=tuple(map(tuple, params.atoms))
    )


def initial_laurent_map(params: HeleShawParams) -> LaurentMap:
    coeffs = as_complex(params.coeffs)
    if params.orientation == "exterior":
        return exterior_map(params.r, coeffs or [0j])
    return interior_map(complex(*params.source), params.r, coeffs)


def run_hele_shaw(config: RunConfig) -> Outcome:
    params: HeleShawParams = config.params
    trajectory = evolve_string(
        initial_laurent_map(params),
        params.dt,
        params.steps,
        flux=params.flux,
        tol=params.tol,
        unsafe=params.unsafe,
    )
    emitter = Emitter(config)
    emitter.csv("trajectory.csv", trajectory.dump_csv)
    emitter.csv("moments.csv", partial(dump_moments_csv, trajectory, params.moments))
    drift = richardson_invariance(trajectory, params.moments)
    diagnostics = {
        "steps": float(len(trajectory.maps) - 1),
        "final_area": map_area(trajectory.final),
        "max_moment_drift": float(np.max(drift)),
    }
    emitter.json("run.json", {"moment_drift": drift, "diagnostics": diagnostics, "flux": params.flux.model_dump()})
    picks = np.unique(np.linspace(0, len(trajectory.maps) - 1, params.snapshots).round().astype(int))
    emitter.svg(
        "boundary.svg",
        lambda path: render_curves(
            [boundary_points(trajectory.maps[i]) for i in picks],
            path,
            labels=[f"t = {trajectory.times[i]:.3g}" for i in picks],
            title="Hele-Shaw",
        ),
    )
    return emitter.files, diagnostics


def run_coulomb(config: RunConfig) -> Outcome:
    params: CoulombParams = config.params
    state = initial_state(
        params.N,
        params.hbar,
        config.seed,
        as_complex(params.potential),
        params.kernel,
        params.sampling_radius,
    )
    chain = metropolis_run(
        state, params.sweeps, params.proposal_scale, config.seed, burn_in=params.burn_in, thin=params.thin
    )
    stats = droplet_stats(chain, params.bins)
    boundary = boundary_estimate(chain, params.sectors)
    diagnostics = {
        "acceptance": chain.acceptance,
        "support_radius": stats.support_radius,
        "moment_radius": stats.moment_radius,
        "predicted_radius": predicted_droplet_radius(params.hbar, params.N),
        "flatness": stats.flatness(),
    }
    if not params.potential and params.kernel == "coulomb":
        diagnostics["circle_distance"] = compare_to_hele_shaw(boundary, circular_droplet(params.hbar, params.N))
    emitter = Emitter(config)
    emitter.csv("chain.csv", chain.dump_csv)
    emitter.csv("density.csv", stats.dump_csv)
    emitter.frame("boundary.csv", pd.DataFrame({"x": boundary.real, "y": boundary.imag}))
    emitter.json("droplet.json", {"diagnostics": diagnostics, "proposal_scale": chain.proposal_scale})
    emitter.svg(
        "droplet.svg",
        lambda path: render_points(chain.final.positions, path, overlay=[boundary], title=f"N = {params.N}"),
    )
    return emitter.files, diagnostics


def tau_window(params: TauParams) -> np.ndarray:
    return np.linspace(params.x_min, params.x_max, params.points)


def soliton_data(params: TauParams, x: float = 0.0) -> SolitonData:
    return SolitonData.kdv(params.momenta, params.phases, x=x, higher=(params.t3,))


def run_tau(config: RunConfig) -> Outcome:
    params: TauParams = config.params
    x = tau_window(params)
    emitter = Emitter(config)
    if params.kind == "hirota":
        data = soliton_data(params)
        potential = kdv_potential(data, x)
        log_taus = [log_tau(soliton_data(params, xi)) for xi in x]
        frame = pd.DataFrame({"x": x, "log_tau": log_taus, "potential": potential})
        h = RESIDUAL_SPACING / max(params.momenta)
        diagnostics = {"solitons": float(data.N), "kdv_residual": kdv_residual(data, h)}
        label = f"{data.N}-soliton"
    else:
        poly = adler_moser(params.level, params.am_times)
        with np.errstate(divide="ignore", invalid="ignore"):
            potential = poly.potential(x)
        frame = pd.DataFrame({"x": x, "p": poly(x), "potential": potential})
        emitter.json("poly.json", poly)
        diagnostics = {"level": float(poly.level), "degree": float(poly.degree)}
        label = f"p_{poly.level}"
    emitter.frame("potential.csv", frame)
    finite = np.isfinite(potential)
    emitter.svg(
        "potential.svg",
        lambda path: render_spectra([(x[finite], potential[finite], label)], path, xlabel="x", ylabel="V"),
    )
    return emitter.files, diagnostics


def load_map_ensemble(path: Path) -> List[CompositeMap]:
    """
    The maps of a growth run, read through its manifest.

    :raises ConfigError: If the manifest does not describe a map ensemble.
    :raises ArtifactError: If a map file is missing or does not match its checksum.
    """
    manifest = Manifest.load(path)
    if manifest.kind not in MAP_ENSEMBLE_KINDS:
        raise ConfigError(f"{path} is a {manifest.kind} run, not a map ensemble.", key="spectrum.ensemble")
    names = manifest.matching("map")
    if not names:
        raise ConfigError(f"{path} lists no map artifacts.", key="spectrum.ensemble")
    directory = path.parent
    problems = checksum_mismatches(manifest, directory, names)
    if problems:
        raise ArtifactError(f"Ensemble maps do not match {path}.", notes=[f"{n}: {p}" for n, p in problems.items()])
    log_scale = 0.0 if manifest.kind == "grow-hl" else -float(manifest.params["T_burn"])
    return [load_map_csv(directory / name, log_scale) for name in names]


def run_spectrum(config: RunConfig) -> Outcome:
    params: SpectrumParams = config.params
    maps = load_map_ensemble(params.ensemble)
    curve = beta_spectrum(
        maps,
        params.q,
        params.eps,
        n_theta=params.n_theta,
        bootstrap=params.bootstrap,
        seed=config.seed,
        unbounded=params.unbounded,
        workers=config.workers,
    )
    emitter = Emitter(config)
    emitter.csv("beta.csv", curve.dump_csv)
    diagnostics = {"members": float(len(maps)), "max_stderr": float(np.max(curve.errors))}
    series = [(curve.abscissa, curve.values, "estimate")]
    if params.kappa is not None:
        exact = exact_beta_curve(curve.abscissa, params.kappa)
        emitter.csv("beta_exact.csv", exact.dump_csv)
        diagnostics["max_exact_gap"] = float(np.max(np.abs(exact.values - curve.values)))
        series.append((exact.abscissa, exact.values, f"exact, kappa = {params.kappa:g}"))
    if params.legendre and len(curve) >= 2:
        try:
            f = legendre_beta_to_f(curve)
        except ParameterError as exc:
            logger.warning(f"Skipping the singularity spectrum: {exc}")
        else:
            emitter.csv("f.csv", f.dump_csv)
    emitter.json("spectrum.json", {"beta": curve.model_dump(mode="json"), "diagnostics": diagnostics})
    emitter.svg("spectrum.svg", lambda path: render_spectra(series, path, ylabel="beta(q)"))
    return emitter.files, diagnostics


COMMAND_RUNNERS: Dict[str, Callable[[RunConfig], Outcome]] = {
    "grow-hl": run_grow_hl,
    "grow-dla": run_grow_dla,
    "grow-sle": run_grow_sle,
    "grow-lle": run_grow_lle,
    "hele-shaw": run_hele_shaw,
    "coulomb": run_coulomb,
    "tau": run_tau,
    "spectrum": run_spectrum,
}


def run(config: RunConfig) -> Manifest:
    """
    Execute a run and write its manifest.

    :return: The manifest, also written to ``manifest.json`` in the output directory.
    """
    logger.info(f"Running {config.command} with seed {config.seed.seed}, stream {config.seed.stream}")
    start = time.perf_counter()
    files, diagnostics = COMMAND_RUNNERS[config.command](config)
    wall_time = time.perf_counter() - start
    manifest = Manifest.build(
        config.command, __version__, config.echo(), wall_time, config.output_dir, files, diagnostics
    )
    manifest.dump(config.output_dir)
    logger.info(f"{config.command} finished in {wall_time:.2f}s with {len(files)} artifacts")
    return manifest
