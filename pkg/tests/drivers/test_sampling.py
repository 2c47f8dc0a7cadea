import math

import numpy as np
import pytest
from pydantic import ValidationError

from loewner_forge.core import ArtifactError, ParameterError
from loewner_forge.drivers import (
    DriverKind,
    DriverPath,
    RngSeed,
    sample_brownian,
    sample_levy,
    sample_uniform_angles,
    zero_driver,
)


def test_same_seed_same_path():
    first = sample_brownian(2.0, 1e-3, 100, RngSeed(seed=7))
    second = sample_brownian(2.0, 1e-3, 100, RngSeed(seed=7))
    other = sample_brownian(2.0, 1e-3, 100, RngSeed(seed=7, stream=1))
    assert np.array_equal(first.values, second.values)
    assert not np.array_equal(first.values, other.values)


def test_member_streams():
    root = RngSeed(seed=3)
    assert root.member(4) == RngSeed(seed=3, stream=4)


def test_brownian_increment_variance():
    kappa, dt = 2.0, 1e-3
    path = sample_brownian(kappa, dt, 20000, RngSeed(seed=11))
    assert path.values[0] == 0.0
    assert path.t_total == pytest.approx(20.0)
    assert np.var(np.diff(path.values)) == pytest.approx(kappa * dt, rel=0.05)


def test_zero_driver():
    path = zero_driver(0.01, 50)
    assert np.all(path.values == 0)
    assert path.kind.kappa == 0
    assert path.steps == 50


def test_levy_jumps_are_multiples_of_scale():
    path = sample_levy(0.0, 5.0, 0.8, 1e-2, 2000, RngSeed(seed=5))
    assert path.jump_count > 0
    assert np.allclose(np.diff(path.values), path.jumps)
    multiples = path.jumps / 0.8
    assert np.allclose(multiples, np.round(multiples))
    assert path.kind.jump_rate == pytest.approx(5.0)


def test_levy_mixture_atoms():
    path = sample_levy(1.0, 1.0, 0.5, 1e-2, 100, RngSeed(seed=2), extra_atoms=[(2.0, 0.5)])
    assert path.kind.atoms == ((0.5, 1.0), (2.0, 0.5))


def test_uniform_angles():
    path = sample_uniform_angles(500, RngSeed(seed=1))
    assert len(path.values) == 500
    assert np.all((path.values >= 0) & (path.values < 2 * math.pi))
    assert path.kind.name == "uniform_iid"


@pytest.mark.parametrize(
    "call",
    [
        lambda: sample_brownian(-1.0, 1e-3, 10, RngSeed()),
        lambda: sample_brownian(1.0, 0.0, 10, RngSeed()),
        lambda: sample_brownian(1.0, 1e-3, 0, RngSeed()),
        lambda: sample_levy(1.0, 1.0, 0.0, 1e-3, 10, RngSeed()),
        lambda: sample_uniform_angles(0, RngSeed()),
    ],
)
def test_invalid_parameters(call):
    with pytest.raises(ParameterError):
        call()


def test_value_at():
    path = DriverPath(breakpoints=[0.0, 1.0, 2.0], values=[0.0, 0.5, -0.5], kind=DriverKind(name="brownian"))
    assert path.value_at(0.5) == 0.0
    assert path.value_at(1.0) == 0.5
    assert path.value_at(2.0) == -0.5
    assert np.array_equal(path.value_at(np.array([0.0, 1.5])), [0.0, 0.5])
    with pytest.raises(ParameterError):
        path.value_at(2.5)


@pytest.mark.parametrize(
    "breakpoints,values,name",
    [
        ([0.0, 1.0], [0.3, 0.0], "brownian"),
        ([0.5, 1.0], [0.0, 0.0], "prescribed"),
        ([0.0, 1.0, 1.0], [0.0, 0.0, 0.0], "prescribed"),
        ([0.0, 1.0], [0.0], "prescribed"),
    ],
)
def test_invalid_paths(breakpoints, values, name):
    with pytest.raises(ValidationError):
        DriverPath(breakpoints=breakpoints, values=values, kind=DriverKind(name=name))


def test_csv_replay(tmp_path):
    path = sample_brownian(6.0, 1e-3, 50, RngSeed(seed=9))
    file = path.dump_csv(tmp_path / "driver.csv")
    replay = DriverPath.load_csv(file)
    assert replay.kind.name == "prescribed"
    assert np.array_equal(replay.values, path.values)
    assert np.array_equal(replay.breakpoints, path.breakpoints)


def test_csv_errors(tmp_path):
    with pytest.raises(ArtifactError):
        DriverPath.load_csv(tmp_path / "missing.csv")
    (tmp_path / "bad.csv").write_text("a,b\n0,1\n")
    with pytest.raises(ArtifactError):
        DriverPath.load_csv(tmp_path / "bad.csv")
