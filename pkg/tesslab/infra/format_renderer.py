import json
import math
from enum import Enum
from pathlib import Path

import numpy as np
import yaml

from tesslab.core.ports.render import Renderer


def normalize(obj):
    """Plain JSON/YAML values: numpy scalars unwrapped, non finite floats as None."""
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}

    if isinstance(obj, (list, tuple, np.ndarray)):
        return [normalize(x) for x in obj]

    if isinstance(obj, Enum):
        return obj.value

    if isinstance(obj, Path):
        return str(obj)

    if isinstance(obj, np.generic):
        obj = obj.item()

    if isinstance(obj, float) and not math.isfinite(obj):
        return None

    return obj


class JsonRenderer(Renderer):
    def render(self, data: dict) -> str:
        return json.dumps(normalize(data), indent=2, sort_keys=False)


class YamlRenderer(Renderer):
    def render(self, data: dict) -> str:
        return yaml.safe_dump(normalize(data), sort_keys=False)
