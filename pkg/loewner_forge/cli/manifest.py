"""
Manifest
--------
The JSON record written next to the artifacts of every run: the full configuration echo,
the command, the wall time and the SHA-256 checksum of every artifact.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from loewner_forge.core.errors import ArtifactError
from loewner_forge.utils.io import file_digest, read_json, write_json

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


class Manifest(BaseModel):
    """
    Record of one run.

    Artifact names are relative to the directory holding the manifest.
    """

    model_config = ConfigDict(frozen=True)

    kind: str
    """The command that produced the run."""
    version: str
    config: Dict[str, Any]
    """Echo of the validated configuration."""
    wall_time: float = Field(ge=0)
    """Seconds spent in the command."""
    artifacts: Dict[str, str] = Field(default_factory=dict)
    """SHA-256 checksums keyed by file name."""
    diagnostics: Dict[str, float] = Field(default_factory=dict)

    @property
    def params(self) -> Dict[str, Any]:
        return self.config.get("params", {})

    @classmethod
    def build(
        cls,
        kind: str,
        version: str,
        config: Dict[str, Any],
        wall_time: float,
        directory: Union[str, Path],
        files: Iterable[Union[str, Path]],
        diagnostics: Dict[str, float],
    ) -> "Manifest":
        directory = Path(directory)
        artifacts = {}
        for file in files:
            file = Path(file)
            artifacts[file.relative_to(directory).as_posix()] = file_digest(file)
        return cls(
            kind=kind,
            version=version,
            config=config,
            wall_time=wall_time,
            artifacts=artifacts,
            diagnostics=diagnostics,
        )

    def dump(self, directory: Union[str, Path]) -> Path:
        path = Path(directory) / MANIFEST_NAME
        write_json(path, self)
        logger.info(f"Wrote manifest {path} with {len(self.artifacts)} artifacts")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Manifest":
        """
        :raises ArtifactError: If the file is missing or is not a manifest.
        """
        try:
            return cls.model_validate(read_json(path))
        except ValidationError as exc:
            raise ArtifactError(f"{path} is not a run manifest.") from exc

    def matching(self, prefix: str, suffix: str = ".csv") -> List[str]:
        """Artifact names with the given prefix and suffix, sorted."""
        return sorted(name for name in self.artifacts if name.startswith(prefix) and name.endswith(suffix))


def checksum_mismatches(
    manifest: Manifest, directory: Union[str, Path], names: Optional[Iterable[str]] = None
) -> Dict[str, str]:
    """
    Compare artifacts with their recorded checksums.

    :param names: Artifacts to check; all of them by default.
    :return: Problem descriptions keyed by artifact name; empty when all match.
    """
    directory = Path(directory)
    problems = {}
    for name in manifest.artifacts if names is None else names:
        digest = manifest.artifacts[name]
        try:
            actual = file_digest(directory / name)
        except ArtifactError:
            problems[name] = "missing"
            continue
        if actual != digest:
            problems[name] = "checksum mismatch"
    return problems
