"""
Output helpers: CSV tables with ``#`` metadata, JSON summaries and
all-or-nothing publication of a run's files.
"""

import json
import math
import os
import shutil
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterator, Mapping, Optional, Union

import numpy as np
import pandas as pd
import structlog

logger = structlog.get_logger(__name__)

PathLike = Union[str, Path]


class StagedOutput:
    """Stage files in a hidden directory and move them into place together.

    On an exception nothing is published and the staging directory is
    removed, so a failed run leaves no partial outputs behind.
    """

    def __init__(self, directory: PathLike):
        self.directory = Path(directory)
        self.staging: Optional[Path] = None
        self.published: Dict[str, Path] = {}

    def __enter__(self) -> "StagedOutput":
        self.directory.mkdir(parents=True, exist_ok=True)
        self.staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=self.directory))
        return self

    def path(self, name: str) -> Path:
        if self.staging is None:
            raise RuntimeError("StagedOutput used outside its context")
        return self.staging / name

    def __exit__(self, exc_type, exc, tb) -> bool:
        if self.staging is None:
            return False
        try:
            if exc_type is None:
                for staged in sorted(self.staging.iterdir()):
                    target = self.directory / staged.name
                    os.replace(staged, target)
                    self.published[staged.name] = target
                logger.info("Outputs written", directory=str(self.directory), files=sorted(self.published))
            else:
                logger.warning("Discarding partial outputs", directory=str(self.directory))
        finally:
            shutil.rmtree(self.staging, ignore_errors=True)
        return False


def _metadata_lines(metadata: Mapping[str, Any]) -> Iterator[str]:
    for key, value in metadata.items():
        yield f"# {key}: {value}\n"


def write_csv(path: PathLike, frame: pd.DataFrame, metadata: Optional[Mapping[str, Any]] = None) -> Path:
    """Write ``frame`` with a header row after ``#``-prefixed metadata lines.

    Floats use Python's shortest round-trip representation.
    """
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        for line in _metadata_lines(metadata or {}):
            handle.write(line)
        frame.to_csv(handle, index=False, lineterminator="\n", na_rep="nan")
    return path


def read_csv(path: PathLike) -> pd.DataFrame:
    """Read a CSV written by :func:`write_csv`, skipping metadata lines."""
    return pd.read_csv(path, comment="#")


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars and non-finite floats (to ``None``) for JSON."""
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_json(path: PathLike, data: Mapping[str, Any]) -> Path:
    path = Path(path)
    path.write_text(json.dumps(to_jsonable(data), indent=2, sort_keys=False) + "\n", encoding="utf-8")
    return path
