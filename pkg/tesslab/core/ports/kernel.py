import math
from typing import Protocol

import numpy as np

from tesslab.core.models.cell import Cell, WeightModel
from tesslab.core.models.point import Box, MarkedPoint


class CellKernel(Protocol):
    """
    Computes the cell of one generator against a set of competitors.

    Implementations must be:
    - pure (the result depends on the arguments only)
    - independent of the order in which cells are requested
    - conservative: a cell reaching the clip boundary is Unbounded
    """

    def cell(
        self,
        generator: MarkedPoint,
        positions: np.ndarray,
        marks: np.ndarray,
        clip: Box,
        model: WeightModel,
        reach: float = math.inf,
    ) -> Cell:
        """
        positions/marks are the competitors sorted by distance to the
        generator; reach, when finite, is a certified bound on the distance
        from the generator to any point of its cell.
        """
