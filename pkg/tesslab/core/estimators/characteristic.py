import math

from tesslab.core.errors import InvalidParameterError
from tesslab.core.geometry.measures import (
    contour_length,
    enclosing_circle,
    hull_points,
    max_pairwise_distance,
    polygon_area,
    polygon_inradius,
    polygon_perimeter,
    raster_inradius,
)
from tesslab.core.models.cell import Cell, CellShape
from tesslab.core.models.characteristic import Characteristic, CharacteristicKind


def _volume(cell: Cell) -> float:
    if cell.shape is CellShape.polygon:
        return abs(polygon_area(cell.vertices))
    return float(cell.mask.sum()) * cell.grid_h ** 2


def _boundary(cell: Cell) -> float:
    if cell.shape is CellShape.polygon:
        return polygon_perimeter(cell.vertices)
    return contour_length(cell.mask, cell.grid_h)


def _extent_points(cell: Cell):
    return hull_points(cell.corner_points())


def _inradius(cell: Cell) -> float:
    if cell.shape is CellShape.polygon:
        return polygon_inradius(cell.vertices)
    return raster_inradius(cell.mask, cell.grid_h)


def evaluate(h: Characteristic, cell: Cell) -> float:
    """
    Value of the characteristic h on a cell. Empty and Unbounded cells
    score 0 for every variant.
    """
    if not cell.bounded:
        return 0.0

    match h.kind:
        case CharacteristicKind.volume:
            return _volume(cell)
        case CharacteristicKind.boundary_measure:
            return _boundary(cell)
        case CharacteristicKind.diameter:
            return max_pairwise_distance(_extent_points(cell))
        case CharacteristicKind.circumradius:
            return enclosing_circle(_extent_points(cell))[2]
        case CharacteristicKind.inradius:
            return _inradius(cell)
        case CharacteristicKind.vertex_count:
            if cell.shape is not CellShape.polygon:
                raise InvalidParameterError("Vertex counts are only defined on polygon cells")
            return float(len(cell.vertices))
        case CharacteristicKind.constant:
            return h.factor
        case CharacteristicKind.indicator_volume_leq:
            return 1.0 if _volume(cell) <= h.t else 0.0
        case CharacteristicKind.indicator_leq:
            return 1.0 if evaluate(h.base, cell) <= h.t else 0.0
        case CharacteristicKind.scaled:
            return h.factor * evaluate(h.base, cell)
    raise InvalidParameterError(f"Unknown characteristic {h.kind}")


def indicator(value: float, t: float) -> float:
    """1{value <= t}; the NaN of a missing value never counts."""
    return 1.0 if not math.isnan(value) and value <= t else 0.0
