import csv
import json
from pathlib import Path

import numpy as np

from tesslab.core.models.point import Box, MarkedConfiguration


def read_csv(path: Path) -> list[dict[str, str]]:
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


def read_json(path: Path) -> dict:
    return json.loads(path.read_text())


def configuration(points, marks=None, half: float = 10.0) -> MarkedConfiguration:
    positions = np.asarray(points, dtype=float).reshape(-1, 2)
    marks = np.zeros(len(positions)) if marks is None else np.asarray(marks, dtype=float)
    return MarkedConfiguration(positions, marks, Box((-half, -half), (half, half)))
