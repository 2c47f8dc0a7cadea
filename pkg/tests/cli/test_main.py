import json

import pandas as pd
import pytest

from loewner_forge.cli import MANIFEST_NAME, Manifest, verify
from loewner_forge.cli.__main__ import EXIT_CONFIG, EXIT_OK, EXIT_VERIFY


def test_hl_runs_are_byte_identical(run_cli, tmp_path):
    for out in ("first", "second"):
        assert run_cli("grow-hl", "--seed", 1, "--set", "grow-hl.n=100", "--emit", "csv,json", "--out", out) == EXIT_OK
    for name in ("map.csv", "driver.csv"):
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()
    first = Manifest.load(tmp_path / "first" / MANIFEST_NAME)
    second = Manifest.load(tmp_path / "second" / MANIFEST_NAME)
    assert first.artifacts == second.artifacts
    assert first.kind == "grow-hl"
    assert first.params["n"] == 100
    assert first.config["seed"] == 1
    assert first.diagnostics["slits"] == 100


def test_hl_run_verifies(run_cli, tmp_path):
    assert run_cli("grow-hl", "-s", 2, "--set", "grow-hl.n=40", "--set", "grow-hl.alpha=1", "-o", "hl") == EXIT_OK
    assert sorted(Manifest.load(tmp_path / "hl" / MANIFEST_NAME).artifacts) == [
        "driver.csv",
        "map.csv",
        "run.json",
        "trace.svg",
    ]
    assert run_cli("verify", tmp_path / "hl" / MANIFEST_NAME) == EXIT_OK


def test_missing_ensemble_is_reported(run_cli, capsys):
    assert run_cli("spectrum", "--set", "spectrum.ensemble=nowhere/manifest.json") == EXIT_CONFIG
    assert "spectrum.ensemble" in capsys.readouterr().err


def test_unknown_key_is_reported(run_cli, capsys):
    assert run_cli("tau", "--set", "tau.momentum=3") == EXIT_CONFIG
    assert "tau.momentum" in capsys.readouterr().err


def test_verify_needs_a_manifest(run_cli):
    assert run_cli("verify") == EXIT_CONFIG
    assert run_cli("verify", "nowhere/manifest.json") == EXIT_CONFIG


@pytest.fixture
def circle_run(run_cli, tmp_path):
    config = tmp_path / "circle.yaml"
    config.write_text("hele-shaw:\n  r: 1.0\n  dt: 0.001\n  steps: 1000\n")
    assert run_cli("hele-shaw", "--config", config, "--emit", "csv,json", "--out", "circle") == EXIT_OK
    return tmp_path / "circle"


def test_circle_trajectory(circle_run):
    frame = pd.read_csv(circle_run / "trajectory.csv")
    assert len(frame) == 1001
    assert frame["t"].iloc[-1] == pytest.approx(1.0)
    assert ((frame["r"] - (frame["t"] + 1.0) ** 0.5).abs() / frame["r"]).max() < 1e-6

    report = verify(circle_run / MANIFEST_NAME)
    assert report.passed
    names = {check.name for check in report.checks}
    assert {"checksums", "string equation residual", "area conservation", "circle radius"} <= names
    assert all(check.status == "pass" for check in report.checks)


def test_corrupted_row_is_named(circle_run, run_cli):
    path = circle_run / "trajectory.csv"
    frame = pd.read_csv(path)
    frame.loc[500, "r"] *= 1.01
    frame.to_csv(path, index=False, float_format="%.17g")

    report = verify(circle_run / MANIFEST_NAME)
    assert not report.passed
    failures = {check.name: check.detail for check in report.failures}
    assert failures["checksums"] == "trajectory.csv: checksum mismatch"
    assert failures["area conservation"].startswith("row 500 ")
    assert failures["circle radius"].startswith("row 500 ")
    assert run_cli("verify", circle_run / MANIFEST_NAME) == EXIT_VERIFY


def test_dla_charges_reverified(run_cli, tmp_path):
    assert run_cli("grow-dla", "-s", 5, "--set", "grow-dla.n=30", "--emit", "csv", "-o", "dla") == EXIT_OK
    report = verify(tmp_path / "dla" / MANIFEST_NAME)
    checks = {check.name: check for check in report.checks}
    assert report.passed
    assert checks["charge normalization"].status == "pass"
    assert checks["charges match the stored field"].status == "pass"

    charges = pd.read_csv(tmp_path / "dla" / "charges.csv")
    charges.loc[0, "charge"] += 0.01
    charges.to_csv(tmp_path / "dla" / "charges.csv", index=False, float_format="%.17g")
    checks = {check.name: check for check in verify(tmp_path / "dla" / MANIFEST_NAME).checks}
    assert checks["stored charge normalization"].status == "fail"
    assert checks["charges match the stored field"].detail.startswith("row 0: ")


def test_tau_runs(run_cli, tmp_path):
    assert run_cli("tau", "--set", "tau.points=101", "-o", "hirota") == EXIT_OK
    manifest = Manifest.load(tmp_path / "hirota" / MANIFEST_NAME)
    assert manifest.diagnostics["kdv_residual"] < 1e-2
    assert verify(tmp_path / "hirota" / MANIFEST_NAME).passed

    assert run_cli("tau", "--set", "tau.kind=adler-moser", "--set", "tau.level=3", "-o", "am") == EXIT_OK
    poly = json.loads((tmp_path / "am" / "poly.json").read_text())
    assert poly["level"] == 3
    report = verify(tmp_path / "am" / MANIFEST_NAME)
    assert report.passed
    assert {check.name for check in report.checks} >= {"recurrence", "potential recomputation"}


def test_coulomb_runs(run_cli, tmp_path):
    overrides = ["coulomb.N=32", "coulomb.sweeps=200", "coulomb.burn_in=50", "coulomb.bins=8", "coulomb.sectors=8"]
    argv = [item for override in overrides for item in ("--set", override)]
    assert run_cli("coulomb", *argv, "-o", "gas") == EXIT_OK
    manifest = Manifest.load(tmp_path / "gas" / MANIFEST_NAME)
    assert 0.0 < manifest.diagnostics["acceptance"] < 1.0
    assert "circle_distance" in manifest.diagnostics
    report = verify(tmp_path / "gas" / MANIFEST_NAME)
    assert report.passed, report.lines(color=False)


def test_spectrum_of_hl_ensemble(run_cli, tmp_path):
    assert run_cli("grow-hl", "--set", "grow-hl.n=50", "--emit", "csv", "-o", "hl") == EXIT_OK
    overrides = [
        f"spectrum.ensemble={tmp_path / 'hl' / MANIFEST_NAME}",
        "spectrum.q=[0, 1, 2]",
        "spectrum.eps=[0.1, 0.03]",
        "spectrum.bootstrap=0",
    ]
    argv = [item for override in overrides for item in ("--set", override)]
    assert run_cli("spectrum", *argv, "--emit", "csv,json", "-o", "spectrum") == EXIT_OK
    report = verify(tmp_path / "spectrum" / MANIFEST_NAME)
    checks = {check.name: check for check in report.checks}
    assert checks["zeroth moment"].status == "pass"
    assert checks["ensemble maps"].status == "pass"

    (tmp_path / "hl" / "map.csv").write_text("index,angle,capacity\n")
    checks = {check.name: check for check in verify(tmp_path / "spectrum" / MANIFEST_NAME).checks}
    assert checks["ensemble maps"].detail == "map.csv: checksum mismatch"
