import logging
import math

import numpy as np
import pandas as pd
import pytest
from scipy import integrate

from loewner_forge.core import ArtifactError, CuspError, DomainError, ParameterError
from loewner_forge.hele_shaw import (
    FluxProfile,
    Trajectory,
    evolve_string,
    exterior_map,
    harmonic_moments,
    interior_map,
    map_area,
    pk_residual,
    solve_velocity,
)
from loewner_forge.hele_shaw import evolution


@pytest.fixture
def perturbed():
    return exterior_map(1.0, [0.0, 0.1, 0.05])


def test_solved_velocity_satisfies_bracket(perturbed):
    velocity = solve_velocity(perturbed, 1.5)
    assert pk_residual(perturbed, velocity, 1.5) < 1e-12


def test_circle_growth():
    trajectory = evolve_string(exterior_map(1.0), 1e-3, 1000)
    radii = np.array([f.r for f in trajectory.maps])
    assert trajectory.times[-1] == pytest.approx(1.0)
    assert np.allclose(radii, np.sqrt(trajectory.times + 1.0), rtol=1e-6, atol=0.0)


def test_ellipse_is_self_similar():
    f = exterior_map(1.0, [0.0, 0.2])
    trajectory = evolve_string(f, 1e-3, 500)
    areas = trajectory.areas()
    assert np.allclose(areas - areas[0], math.pi * trajectory.times, atol=1e-6)
    ratios = np.array([g.coeffs[1].real / g.r for g in trajectory.maps])
    assert np.allclose(ratios, 0.2, atol=1e-6)


def test_cusp_halts_evolution():
    with pytest.raises(CuspError) as info:
        evolve_string(exterior_map(1.0, [0.0, 0.99]), 1e-3, 10)
    assert len(info.value.trajectory.maps) == 1
    assert info.value.partial is info.value.trajectory


def test_large_step_is_halved(log_event_catcher):
    logs = log_event_catcher(logging.getLogger(evolution.__name__))
    loose = evolve_string(exterior_map(1.0), 0.5, 2, tol=1.0)
    assert not [record for record in logs if record.getMessage().startswith("Rejected step")]
    strict = evolve_string(exterior_map(1.0), 0.5, 2)
    rejected = [record for record in logs if record.getMessage().startswith("Rejected step")]
    assert len(rejected) >= 2
    assert strict.final.r == pytest.approx(math.sqrt(2.0), rel=1e-5)
    assert abs(strict.final.r - math.sqrt(2.0)) < abs(loose.final.r - math.sqrt(2.0))


def test_contraction_needs_unsafe():
    with pytest.raises(ParameterError):
        evolve_string(exterior_map(1.0), 1e-3, 10, flux=FluxProfile(rate=-1.0))
    trajectory = evolve_string(exterior_map(1.0), 1e-3, 10, flux=FluxProfile(rate=-1.0), unsafe=True)
    assert trajectory.final.r == pytest.approx(math.sqrt(1.0 - 0.01), rel=1e-6)


def test_non_univalent_start_is_rejected():
    with pytest.raises(DomainError):
        evolve_string(exterior_map(1.0, [0.0, 0.0, 0.6]), 1e-3, 1)


def test_invalid_steps():
    with pytest.raises(ParameterError):
        evolve_string(exterior_map(1.0), 0.0, 10)


@pytest.mark.parametrize(
    "profile",
    [
        FluxProfile(kind="linear", rate=0.5, slope=2.0),
        FluxProfile(kind="sinusoidal", rate=1.0, amplitude=0.5, period=0.3),
    ],
)
def test_flux_totals(profile):
    expected, _ = integrate.quad(profile, 0.1, 0.9)
    assert profile.total(0.1, 0.9) == pytest.approx(expected, rel=1e-10)


def test_sinusoidal_contraction_detection():
    assert FluxProfile(kind="sinusoidal", rate=1.0, amplitude=1.5).is_contracting(0.0, 1.0)
    assert not FluxProfile(kind="sinusoidal", rate=1.0, amplitude=0.5).is_contracting(0.0, 1.0)


def test_area_follows_time_dependent_flux(perturbed):
    profile = FluxProfile(kind="sinusoidal", rate=1.0, amplitude=0.5, period=0.2)
    trajectory = evolve_string(perturbed, 5e-4, 400, flux=profile)
    gained = (map_area(trajectory.final) - map_area(perturbed)) / math.pi
    assert gained == pytest.approx(profile.total(0.0, 0.2), abs=1e-6)


@pytest.mark.slow
def test_final_domain_depends_on_injected_volume_only(perturbed):
    constant = evolve_string(perturbed, 5e-4, 800)
    ramp = evolve_string(perturbed, 5e-4, 800, flux=FluxProfile(kind="linear", rate=0.0, slope=5.0))
    first, second = harmonic_moments(constant.final, 4), harmonic_moments(ramp.final, 4)
    assert first.t_area == pytest.approx(second.t_area, abs=1e-6)
    assert np.allclose(first.moments, second.moments, atol=1e-6)
    assert constant.final.r == pytest.approx(ramp.final.r, abs=1e-5)
    assert np.allclose(constant.final.coeffs, ramp.final.coeffs, atol=1e-5)


def test_interior_source_stays_fixed():
    trajectory = evolve_string(interior_map(0.2j, 1.0, [0.1]), 1e-3, 100)
    assert abs(trajectory.final.source - 0.2j) < 1e-12
    assert map_area(trajectory.final) - map_area(trajectory.maps[0]) == pytest.approx(0.1 * math.pi, abs=1e-6)


def test_trajectory_csv(tmp_path, perturbed):
    trajectory = evolve_string(perturbed, 1e-3, 5)
    path = trajectory.dump_csv(tmp_path / "trajectory.csv")
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["t", "r", "re_u0", "im_u0", "re_u1", "im_u1", "re_u2", "im_u2"]
    assert len(frame) == 6
    assert frame["re_u2"].iloc[0] == pytest.approx(0.05)


def test_interior_csv_labels(tmp_path):
    trajectory = evolve_string(interior_map(0.0, 1.0, [0.1, 0.02]), 1e-3, 2)
    assert list(trajectory.to_frame().columns)[2:] == ["re_u0", "im_u0", "re_u2", "im_u2", "re_u3", "im_u3"]


def test_trajectory_csv_reload(tmp_path, perturbed):
    flux = FluxProfile(rate=2.0)
    trajectory = evolve_string(perturbed, 1e-3, 5, flux=flux)
    restored = Trajectory.load_csv(trajectory.dump_csv(tmp_path / "trajectory.csv"), flux=flux)
    assert np.array_equal(restored.times, trajectory.times)
    assert restored.flux == flux
    for original, loaded in zip(trajectory.maps, restored.maps):
        assert loaded.r == original.r
        assert np.array_equal(loaded.coeffs, original.coeffs)


def test_interior_csv_reload(tmp_path):
    trajectory = evolve_string(interior_map(0.1, 1.0, [0.1, 0.02]), 1e-3, 3)
    restored = Trajectory.load_csv(trajectory.dump_csv(tmp_path / "trajectory.csv"), "interior")
    assert restored.orientation == "interior"
    assert restored.final.source == trajectory.final.source
    assert np.array_equal(restored.final.coeffs, trajectory.final.coeffs)


def test_invalid_trajectory_csv(tmp_path, perturbed):
    with pytest.raises(ArtifactError):
        Trajectory.load_csv(tmp_path / "absent.csv")

    frame = evolve_string(perturbed, 1e-3, 5).to_frame()
    frame.drop(columns=["im_u1"]).to_csv(tmp_path / "columns.csv", index=False)
    with pytest.raises(ArtifactError):
        Trajectory.load_csv(tmp_path / "columns.csv")

    frame.loc[3, "r"] = -1.0
    frame.to_csv(tmp_path / "radius.csv", index=False)
    with pytest.raises(ArtifactError) as info:
        Trajectory.load_csv(tmp_path / "radius.csv")
    assert info.value.__notes__ == ["row: 3"]

    frame.loc[3, "r"] = 1.0
    frame.loc[4, "t"] = 0.0
    frame.to_csv(tmp_path / "times.csv", index=False)
    with pytest.raises(ArtifactError):
        Trajectory.load_csv(tmp_path / "times.csv")
