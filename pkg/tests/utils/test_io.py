import hashlib
import json

import numpy as np
import pandas as pd
import pytest
from pydantic import BaseModel, ConfigDict

from loewner_forge.core import ArtifactError
from loewner_forge.utils.devel import ComplexArray, RealArray
from loewner_forge.utils.io import file_digest, read_csv, read_json, write_csv, write_json


class Snapshot(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: RealArray
    points: ComplexArray
    label: str = "snapshot"


class TestJSON:
    @pytest.fixture(scope="function")
    def snapshot(self):
        return Snapshot(times=[0.0, 0.5], points=[1j, 2.0 - 1j])

    def test_model_dump(self, tmp_path, snapshot):
        path = write_json(tmp_path / "snapshot.json", snapshot)
        data = read_json(path)
        assert data == {"label": "snapshot", "points": [[0.0, 1.0], [2.0, -1.0]], "times": [0.0, 0.5]}
        restored = Snapshot.model_validate(data)
        assert np.array_equal(restored.points, snapshot.points)

    def test_plain_data_is_sorted(self, tmp_path):
        path = write_json(tmp_path / "plain.json", {"b": np.arange(3), "a": {"z": 1 + 2j, "y": np.float64(0.25)}})
        text = path.read_text()
        assert text.index('"a"') < text.index('"b"')
        assert text.index('"y"') < text.index('"z"')
        assert json.loads(text) == {"a": {"y": 0.25, "z": [1.0, 2.0]}, "b": [0, 1, 2]}

    def test_complex_values_are_pairs(self, tmp_path):
        data = {"coeffs": np.array([1.0, 0.5 - 2j]), "source": np.complex128(0.25j), "pairs": (3j,)}
        assert read_json(write_json(tmp_path / "complex.json", data)) == {
            "coeffs": [[1.0, 0.0], [0.5, -2.0]],
            "pairs": [[0.0, 3.0]],
            "source": [0.0, 0.25],
        }

    def test_unserializable(self, tmp_path):
        with pytest.raises((TypeError, ValueError)):
            write_json(tmp_path / "bad.json", {"value": object()})

    def test_missing_and_malformed(self, tmp_path):
        with pytest.raises(ArtifactError):
            read_json(tmp_path / "absent.json")
        (tmp_path / "broken.json").write_text("{")
        with pytest.raises(ArtifactError):
            read_json(tmp_path / "broken.json")


def test_file_digest(tmp_path):
    path = tmp_path / "artifact.csv"
    path.write_bytes(b"t,L\n0,0\n")
    first = file_digest(path)
    assert first == hashlib.sha256(b"t,L\n0,0\n").hexdigest()
    path.write_bytes(b"t,L\n0,1\n")
    assert file_digest(path) != first
    with pytest.raises(ArtifactError):
        file_digest(tmp_path / "absent.csv")


class TestCSV:
    def test_floats_reload_exactly(self, tmp_path):
        values = np.random.default_rng(3).standard_normal(200) * np.logspace(-12, 12, 200)
        frame = pd.DataFrame({"index": np.arange(200), "value": values, "third": values / 3.0})
        reloaded = read_csv(write_csv(frame, tmp_path / "values.csv"))
        assert list(reloaded.columns) == ["index", "value", "third"]
        assert np.array_equal(reloaded["value"].to_numpy(), values)
        assert np.array_equal(reloaded["third"].to_numpy(), values / 3.0)
        assert np.array_equal(reloaded["index"].to_numpy(), np.arange(200))

    def test_missing_and_malformed(self, tmp_path):
        with pytest.raises(ArtifactError):
            read_csv(tmp_path / "absent.csv")
        (tmp_path / "empty.csv").write_text("")
        with pytest.raises(ArtifactError):
            read_csv(tmp_path / "empty.csv")
