"""
Verify
------
Re-checks the artifacts of a finished run.

Every artifact is compared with the checksum recorded in the manifest, then the invariant suite
of the run's command is evaluated on the reloaded artifacts: residuals, conserved quantities,
normalizations and recomputations from the stored parameters. Checks whose artifacts were not
emitted are skipped.
"""

import logging
import math
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Literal, Optional, Union

import numpy as np
from colorama import Fore, Style
from pydantic import BaseModel, ConfigDict

from loewner_forge.cli.commands import soliton_data, tau_window
from loewner_forge.cli.config import CoulombParams, HeleShawParams, TauParams, as_complex
from loewner_forge.cli.manifest import Manifest, checksum_mismatches
from loewner_forge.core.composite import fit_leading_coefficient
from loewner_forge.core.errors import ArtifactError, LoewnerForgeError
from loewner_forge.coulomb_gas import GasChain, initial_state
from loewner_forge.drivers.path import DriverKind, DriverPath
from loewner_forge.drivers.seed import RngSeed
from loewner_forge.growth import LatticeCluster, exact_charges, load_map_csv
from loewner_forge.hele_shaw import Trajectory, domain_moments, pk_residual, solve_velocity
from loewner_forge.multifractal import SpectrumCurve
from loewner_forge.tau_functions import AdlerMoserPoly, adler_moser, kdv_potential, log_tau
from loewner_forge.utils.io import read_csv

logger = logging.getLogger(__name__)

CheckStatus = Literal["pass", "fail", "skip"]

CHARGE_TOLERANCE = 1e-9
RECOMPUTE_TOLERANCE = 1e-8
LEADING_TOLERANCE = 1e-6
AREA_TOLERANCE = 1e-6
RADIUS_TOLERANCE = 1e-6
MOMENT_TOLERANCE = 1e-5
MOMENT_FLOOR = 1e-9
POTENTIAL_TOLERANCE = 1e-10
ZERO_MOMENT_TOLERANCE = 1e-9

COLORS = {"pass": Fore.GREEN, "fail": Fore.RED, "skip": Fore.YELLOW}


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    status: CheckStatus
    detail: str = ""


class VerificationReport(BaseModel):
    """Outcome of :py:func:`verify`."""

    model_config = ConfigDict(frozen=True)

    manifest: Path
    kind: str
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.status != "fail" for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if check.status == "fail"]

    def lines(self, color: bool = True) -> List[str]:
        """One ``STATUS name: detail`` line per check."""
        lines = []
        for check in self.checks:
            status = check.status.upper()
            if color:
                status = f"{COLORS[check.status]}{status}{Style.RESET_ALL}"
            lines.append(f"{status} {check.name}" + (f": {check.detail}" if check.detail else ""))
        return lines


def _outcome(name: str, ok: bool, detail: str = "") -> CheckResult:
    return CheckResult(name=name, status="pass" if ok else "fail", detail=detail)


def _skip(name: str, detail: str) -> CheckResult:
    return CheckResult(name=name, status="skip", detail=detail)


Suite = Callable[[Manifest, Path], Iterator[CheckResult]]


def _row_check(name: str, errors: np.ndarray, tolerance: float, times: Optional[np.ndarray] = None) -> CheckResult:
    """Fail on the first row whose error exceeds ``tolerance``, naming it and its time if known."""
    bad = ~(errors <= tolerance)
    if not np.any(bad):
        return _outcome(name, True, f"max {float(np.max(errors)):.3e}")
    row = int(np.argmax(bad))
    where = f"row {row}" + (f" (t={times[row]:.6g})" if times is not None else "")
    return _outcome(name, False, f"{where}: {errors[row]:.3e} exceeds {tolerance:.0e}")


def check_hl(manifest: Manifest, directory: Path) -> Iterator[CheckResult]:
    if "map.csv" not in manifest.artifacts:
        yield _skip("map", "map.csv was not emitted")
        return
    F = load_map_csv(directory / "map.csv")
    params = manifest.params
    yield _outcome("capacities positive", bool(np.all(F.capacities > 0)))
    if params.get("alpha") == 0:
        spread = float(np.max(np.abs(F.capacities - params["delta_a"])))
        yield _outcome("constant capacities", spread == 0.0, f"max deviation {spread:.3e}")
    fitted = abs(fit_leading_coefficient(F))
    error = abs(fitted - F.leading_coefficient) / F.leading_coefficient
    yield _outcome("leading coefficient", error < LEADING_TOLERANCE, f"relative error {error:.3e}")
    if "driver.csv" in manifest.artifacts:
        driver = DriverPath.load_csv(directory / "driver.csv", kind=DriverKind(name="uniform_iid"))
        gap = float(np.max(np.abs(np.angle(np.exp(1j * (driver.angles() - F.angles))))))
        yield _outcome("driver angles", gap < RECOMPUTE_TOLERANCE, f"max gap {gap:.3e}")


def check_whole_plane(manifest: Manifest, directory: Path) -> Iterator[CheckResult]:
    names = manifest.matching("map_")
    if not names:
        yield _skip("maps", "no map was emitted")
        return
    T_burn, t = float(manifest.params["T_burn"]), float(manifest.params["t"])
    normalization, capacity_gap, angle_gap = 0.0, 0.0, 0.0
    for name in names:
        F = load_map_csv(directory / name, log_scale=-T_burn)
        normalization = max(normalization, abs(F.leading_coefficient / math.exp(t) - 1.0))
        driver_name = name.replace("map_", "driver_")
        if driver_name in manifest.artifacts:
            driver = DriverPath.load_csv(directory / driver_name)
            if len(driver.interval_lengths()) != len(F):
                raise ArtifactError(f"{driver_name} does not have one interval per slit of {name}.")
            capacity_gap = max(capacity_gap, float(np.max(np.abs(driver.interval_lengths() - F.capacities))))
            wrapped = np.angle(np.exp(1j * (driver.interval_values() - F.angles)))
            angle_gap = max(angle_gap, float(np.max(np.abs(wrapped))))
    yield _outcome("whole-plane normalization", normalization < 1e-9, f"max relative error {normalization:.3e}")
    yield _outcome("capacities match driver", capacity_gap < 1e-12, f"max gap {capacity_gap:.3e}")
    yield _outcome("slit angles match driver", angle_gap < RECOMPUTE_TOLERANCE, f"max gap {angle_gap:.3e}")


def check_dla(manifest: Manifest, directory: Path) -> Iterator[CheckResult]:
    if "cluster.csv" not in manifest.artifacts:
        yield _skip("cluster", "cluster.csv was not emitted")
        return
    cluster = LatticeCluster.load_csv(directory / "cluster.csv")
    box_radius = manifest.diagnostics.get("box_radius")
    centre = None
    if "box_centre_m" in manifest.diagnostics and "box_centre_n" in manifest.diagnostics:
        centre = (manifest.diagnostics["box_centre_m"], manifest.diagnostics["box_centre_n"])
    recomputed = exact_charges(cluster, None if box_radius is None else int(box_radius), centre)
    total = float(np.sum(recomputed.charges))
    yield _outcome("charge normalization", abs(total - 1.0) < CHARGE_TOLERANCE, f"sum {total!r}")
    if "charges.csv" not in manifest.artifacts:
        yield _skip("stored charges", "charges.csv was not emitted")
        return
    stored = read_csv(directory / "charges.csv")
    sites = stored[["m", "n"]].to_numpy()
    if sites.shape != cluster.boundary.shape or np.any(sites != cluster.boundary):
        yield _outcome("stored charges", False, "charge sites differ from the cluster boundary")
        return
    charges = stored["charge"].to_numpy()
    stored_total = float(np.sum(charges))
    yield _outcome(
        "stored charge normalization",
        abs(stored_total - 1.0) < CHARGE_TOLERANCE and bool(np.all(charges >= 0)),
        f"sum {stored_total!r}",
    )
    yield _row_check("charges match the stored field", np.abs(charges - recomputed.charges), RECOMPUTE_TOLERANCE)


def check_hele_shaw(manifest: Manifest, directory: Path) -> Iterator[CheckResult]:
    if "trajectory.csv" not in manifest.artifacts:
        yield _skip("trajectory", "trajectory.csv was not emitted")
        return
    params = HeleShawParams.model_validate(manifest.params)
    trajectory = Trajectory.load_csv(directory / "trajectory.csv", params.orientation, params.flux)
    times = trajectory.times
    sourced = np.array([params.flux.total(0.0, t) for t in times])

    residuals = np.array(
        [pk_residual(f, solve_velocity(f, params.flux(t)), params.flux(t)) for t, f in zip(times, trajectory.maps)]
    )
    yield _row_check("string equation residual", residuals, params.tol, times)

    vectors = [domain_moments(f, params.moments) for f in trajectory.maps]
    expected = vectors[0].t_area + sourced
    areas = np.array([vector.t_area for vector in vectors])
    yield _row_check("area conservation", np.abs(areas - expected) / np.maximum(1.0, expected), AREA_TOLERANCE, times)

    initial = vectors[0].moments
    scale = np.where(np.abs(initial) > MOMENT_FLOOR, np.abs(initial), 1.0)
    drift = np.array([np.max(np.abs(vector.moments - initial) / scale) for vector in vectors])
    yield _row_check("moment conservation", drift, MOMENT_TOLERANCE, times)

    if params.is_circle:
        radii = np.array([f.r for f in trajectory.maps])
        exact = np.sqrt(radii[0] ** 2 + sourced)
        yield _row_check("circle radius", np.abs(radii - exact) / exact, RADIUS_TOLERANCE, times)


def check_coulomb(manifest: Manifest, directory: Path) -> Iterator[CheckResult]:
    params = CoulombParams.model_validate(manifest.params)
    if "density.csv" in manifest.artifacts:
        density = read_csv(directory / "density.csv")
        rings = density["r_outer"].to_numpy() ** 2 - density["r_inner"].to_numpy() ** 2
        count = float(np.sum(density["density"].to_numpy() * rings) / params.hbar)
        error = abs(count - params.N) / params.N
        yield _outcome("density normalization", error < RECOMPUTE_TOLERANCE, f"integrates to {count:.12g}")
    else:
        yield _skip("density normalization", "density.csv was not emitted")
    if "chain.csv" not in manifest.artifacts:
        yield _skip("chain", "chain.csv was not emitted")
        return
    seed = RngSeed(seed=manifest.config["seed"], stream=manifest.config["stream"])
    state = initial_state(
        params.N,
        params.hbar,
        seed,
        as_complex(params.potential),
        params.kernel,
        params.sampling_radius,
    )
    chain = GasChain.load_csv(directory / "chain.csv", state)
    yield _outcome("finite energies", bool(np.all(np.isfinite(chain.energies))))
    if params.sampling_radius is not None:
        reach = float(np.max(np.abs(chain.positions)))
        yield _outcome("hard wall", reach <= params.sampling_radius, f"largest radius {reach:.6g}")


def check_tau(manifest: Manifest, directory: Path) -> Iterator[CheckResult]:
    params = TauParams.model_validate(manifest.params)
    if params.kind == "adler-moser":
        if "poly.json" in manifest.artifacts:
            poly = AdlerMoserPoly.load_json(directory / "poly.json")
            rebuilt = adler_moser(poly.level, poly.params)
            yield _outcome("recurrence", rebuilt.coeffs == poly.coeffs, f"p_{poly.level} of degree {poly.degree}")
            if "potential.csv" in manifest.artifacts:
                frame = read_csv(directory / "potential.csv")
                with np.errstate(divide="ignore", invalid="ignore"):
                    potential = poly.potential(frame["x"].to_numpy())
                stored = frame["potential"].to_numpy()
                matches = np.isclose(potential, stored, rtol=POTENTIAL_TOLERANCE, atol=0.0, equal_nan=True)
                yield _row_check("potential recomputation", (~matches).astype(float), 0.0)
        else:
            yield _skip("polynomial", "poly.json was not emitted")
        return
    if "potential.csv" not in manifest.artifacts:
        yield _skip("potential", "potential.csv was not emitted")
        return
    frame = read_csv(directory / "potential.csv")
    x = frame["x"].to_numpy()
    if len(x) != params.points or not np.allclose(x, tau_window(params), rtol=0.0, atol=1e-12):
        yield _outcome("grid", False, "the x column does not match the configured window")
        return
    potential = kdv_potential(soliton_data(params), x)
    yield _row_check("potential recomputation", np.abs(potential - frame["potential"].to_numpy()), POTENTIAL_TOLERANCE)
    log_taus = np.array([log_tau(soliton_data(params, xi)) for xi in x])
    errors = np.abs(log_taus - frame["log_tau"].to_numpy()) / np.maximum(1.0, np.abs(log_taus))
    yield _row_check("tau recomputation", errors, POTENTIAL_TOLERANCE)


def check_spectrum(manifest: Manifest, directory: Path) -> Iterator[CheckResult]:
    if "beta.csv" not in manifest.artifacts:
        yield _skip("spectrum", "beta.csv was not emitted")
        return
    curve = SpectrumCurve.load_csv(directory / "beta.csv")
    yield _outcome("spectrum kind", curve.kind == "beta", curve.kind)
    if 0.0 in curve.abscissa:
        value = float(curve.at(0.0))
        yield _outcome("zeroth moment", abs(value) < ZERO_MOMENT_TOLERANCE, f"beta(0) = {value:.3e}")
    if "f.csv" in manifest.artifacts:
        f = SpectrumCurve.load_csv(directory / "f.csv")
        yield _outcome("singularity spectrum", f.kind == "f" and bool(np.all(f.abscissa > 0)), f"{len(f)} points")
    source = Path(manifest.params["ensemble"])
    if source.is_file():
        ensemble = Manifest.load(source)
        problems = checksum_mismatches(ensemble, source.parent, ensemble.matching("map"))
        yield _outcome("ensemble maps", not problems, "; ".join(f"{n}: {p}" for n, p in problems.items()))
    else:
        yield _skip("ensemble maps", f"{source} is not available")


SUITES: Dict[str, Suite] = {
    "grow-hl": check_hl,
    "grow-dla": check_dla,
    "grow-sle": check_whole_plane,
    "grow-lle": check_whole_plane,
    "hele-shaw": check_hele_shaw,
    "coulomb": check_coulomb,
    "tau": check_tau,
    "spectrum": check_spectrum,
}


def verify(path: Union[str, Path]) -> VerificationReport:
    """
    Verify the run recorded in the manifest at ``path``.

    :raises ArtifactError: If the manifest itself is missing or malformed.
    """
    path = Path(path)
    manifest = Manifest.load(path)
    directory = path.parent
    checks: List[CheckResult] = []
    problems = checksum_mismatches(manifest, directory)
    checks.append(
        _outcome("checksums", not problems, "; ".join(f"{name}: {problem}" for name, problem in problems.items()))
    )
    suite = SUITES.get(manifest.kind)
    if suite is None:
        checks.append(_skip("invariants", f"no suite for {manifest.kind!r}"))
    else:
        try:
            checks.extend(suite(manifest, directory))
        except LoewnerForgeError as exc:
            logger.debug(f"Invariant suite of {manifest.kind} failed", exc_info=exc)
            notes = "; ".join(getattr(exc, "__notes__", []))
            checks.append(_outcome("artifacts load", False, f"{exc}" + (f" ({notes})" if notes else "")))
    report = VerificationReport(manifest=path, kind=manifest.kind, checks=checks)
    logger.info(f"Verified {path}: {len(report.failures)} of {len(checks)} checks failed")
    return report
