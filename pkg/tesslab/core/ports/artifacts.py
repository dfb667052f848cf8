from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any, Protocol


class ArtifactWriter(Protocol):
    """Writes the files of one run into its output directory."""

    @property
    def directory(self) -> Path:
        ...

    def write_json(self, name: str, data: Mapping[str, Any]) -> Path:
        ...

    def write_csv(self, name: str, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> Path:
        """Rows carry at least the given columns; floats use 17 significant digits."""
        ...
