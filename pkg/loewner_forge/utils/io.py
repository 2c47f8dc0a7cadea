"""
Artifact IO
-----------
JSON documents, CSV tables and checksums of run artifacts.

CSV floats are written with 17 significant digits and parsed back with the round-trip parser,
so a table reloads bit for bit.
"""

import hashlib
import logging
from pathlib import Path
from typing import Any, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel
from pydantic_core import from_json, to_json

from loewner_forge.core.errors import ArtifactError

logger = logging.getLogger(__name__)

CHUNK_SIZE = 1 << 16

CSV_FLOAT_FORMAT = "%.17g"


def _fallback(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable.")


def write_json(path: Union[str, Path], data: Any) -> Path:
    """
    Write a JSON document with sorted keys and two-space indentation.

    :param data: A pydantic model or plain data; numpy values are converted to lists and scalars,
        complex numbers to ``[re, im]`` pairs.
    """
    path = Path(path)
    if isinstance(data, BaseModel):
        data = data.model_dump(mode="json")
    path.write_bytes(to_json(_sorted(data), indent=2, fallback=_fallback) + b"\n")
    return path


def _sorted(data: Any) -> Any:
    if isinstance(data, dict):
        return {key: _sorted(data[key]) for key in sorted(data)}
    if isinstance(data, (list, tuple)):
        return [_sorted(item) for item in data]
    if isinstance(data, np.ndarray) and np.iscomplexobj(data):
        return _sorted(data.tolist())
    if isinstance(data, (complex, np.complexfloating)):
        return [float(data.real), float(data.imag)]
    return data


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Write a table without its index, floats in :py:data:`CSV_FLOAT_FORMAT`."""
    path = Path(path)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    return path


def read_csv(path: Union[str, Path]) -> pd.DataFrame:
    """
    Read a table written by :py:func:`write_csv`; floats are parsed exactly.

    :raises ArtifactError: If the file is missing or cannot be parsed.
    """
    path = Path(path)
    if not path.is_file():
        raise ArtifactError(f"CSV file {path} does not exist.")
    try:
        return pd.read_csv(path, float_precision="round_trip")
    except (ValueError, pd.errors.ParserError) as exc:
        raise ArtifactError(f"CSV file {path} is malformed: {exc}") from exc


def read_json(path: Union[str, Path]) -> Any:
    """
    :raises ArtifactError: If the file is missing or not valid JSON.
    """
    path = Path(path)
    if not path.is_file():
        raise ArtifactError(f"JSON file {path} does not exist.")
    try:
        return from_json(path.read_bytes())
    except ValueError as exc:
        raise ArtifactError(f"JSON file {path} is malformed: {exc}") from exc


def file_digest(path: Union[str, Path]) -> str:
    """
    SHA-256 of a file, hex encoded.

    :raises ArtifactError: If the file is missing.
    """
    path = Path(path)
    if not path.is_file():
        raise ArtifactError(f"Artifact {path} does not exist.")
    digest = hashlib.sha256()
    with path.open("rb") as stream:
        for block in iter(lambda: stream.read(CHUNK_SIZE), b""):
            digest.update(block)
    return digest.hexdigest()
