import csv
import logging
import os
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from tesslab.core.errors import InvalidParameterError
from tesslab.core.ports.artifacts import ArtifactWriter
from tesslab.core.ports.render import Renderer
from tesslab.infra.format_renderer import JsonRenderer


def format_value(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


class FileArtifactWriter(ArtifactWriter):
    """Artifacts as files of one output directory, created on first write."""

    def __init__(self, directory: Path, renderer: Renderer | None = None) -> None:
        self._directory = Path(directory)
        self._renderer = renderer or JsonRenderer()
        self._logger = logging.getLogger("infra.artifacts")

    @property
    def directory(self) -> Path:
        return self._directory

    def ensure(self) -> None:
        """Creates the directory; an unwritable one is an invalid parameter."""
        try:
            self._directory.mkdir(parents=True, exist_ok=True)
        except OSError as ex:
            raise InvalidParameterError(f"Output directory {self._directory} cannot be created: {ex}") from ex
        if not os.access(self._directory, os.W_OK):
            raise InvalidParameterError(f"Output directory {self._directory} is not writable")

    def _path(self, name: str) -> Path:
        self._directory.mkdir(parents=True, exist_ok=True)
        return self._directory / name

    def write_json(self, name: str, data: Mapping[str, Any]) -> Path:
        path = self._path(name)
        path.write_text(self._renderer.render(dict(data)) + "\n")
        self._logger.debug(f"Wrote {path}")
        return path

    def write_csv(self, name: str, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> Path:
        path = self._path(name)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            count = 0
            for row in rows:
                writer.writerow([format_value(row[c]) for c in columns])
                count += 1
        self._logger.debug(f"Wrote {count} rows to {path}")
        return path
