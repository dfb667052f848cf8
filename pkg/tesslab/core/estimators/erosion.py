import math

from tesslab.core.models.cell import BoundingBox
from tesslab.core.models.point import Box


def erosion_volume(window: Box, bbox: BoundingBox) -> float:
    """
    Volume of the erosion W - C of a box window by a cell with the given
    extents. x + C lies in W exactly when every coordinate of x lies in
    [lower_i - min_i C, upper_i - max_i C], so the erosion is the window
    shrunk by the extents of C.
    """
    return math.prod(max(0.0, side - extent) for side, extent in zip(window.sides, bbox.extents))


def contained(window: Box, cell_box: BoundingBox, shell: float = 0.0) -> bool:
    """The extents of a cell, widened by shell, lie in the window."""
    return all(
        lo <= clo - shell and chi + shell <= hi
        for lo, hi, clo, chi in zip(window.lower, window.upper, cell_box.lower, cell_box.upper)
    )
