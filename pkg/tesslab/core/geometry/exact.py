import logging
import math

import numpy as np

from tesslab.core.errors import InvalidParameterError
from tesslab.core.geometry.clipping import box_polygon, clip_polygon, touches
from tesslab.core.geometry.power import bisector, security_radius
from tesslab.core.models.cell import Cell, WeightModel
from tesslab.core.models.point import Box, MarkedConfiguration, MarkedPoint


class ExactKernel:
    """
    Convex cells of Voronoi and Laguerre diagrams as intersections of the
    bisector half-planes against every competitor, clipped to a box.

    Competitors come sorted by distance, so clipping stops as soon as the
    next competitor lies beyond the security radius of the current polygon.
    reach is accepted for the CellKernel protocol and ignored: the polygon
    still holds points beyond reach until every competitor within its own
    security radius has cut it.
    """

    def __init__(self) -> None:
        self._logger = logging.getLogger("core.geometry.exact")

    def cell(
        self,
        generator: MarkedPoint,
        positions: np.ndarray,
        marks: np.ndarray,
        clip: Box,
        model: WeightModel,
        reach: float = math.inf,
    ) -> Cell:
        if not model.has_linear_bisectors:
            raise InvalidParameterError(f"Exact cells are not available for {model}")

        x = np.asarray(generator.position)
        poly = box_polygon(clip)
        mu = float(marks.max()) if len(marks) else 0.0
        dist = np.linalg.norm(positions - x, axis=1) if len(positions) else np.empty(0)
        radius = float(np.linalg.norm(poly - x, axis=1).max())

        clipped = 0
        for i in range(len(positions)):
            if dist[i] > security_radius(radius, mu, model):
                break
            competitor = MarkedPoint((float(positions[i, 0]), float(positions[i, 1])), float(marks[i]))
            half = bisector(generator, competitor, model)
            poly = clip_polygon(poly, half.normal, half.offset)
            clipped += 1
            if len(poly) == 0:
                self._logger.debug(f"Empty cell for {generator} after {clipped} clips")
                return Cell.empty(generator)
            radius = float(np.linalg.norm(poly - x, axis=1).max())

        if touches(poly, clip):
            return Cell.unbounded(generator)
        return Cell.polygon(generator, poly)


def _competitors(x: MarkedPoint, config: MarkedConfiguration) -> tuple[np.ndarray, np.ndarray]:
    others = config.without(x)
    order = np.argsort(np.linalg.norm(others.positions - np.asarray(x.position), axis=1), kind="stable")
    return others.positions[order], others.marks[order]


def cell_exact(x: MarkedPoint, config: MarkedConfiguration, model: WeightModel, clip: Box) -> Cell:
    """Exact cell of x in config, clipped to clip (which must contain the carrier)."""
    if not clip.contains_box(config.carrier):
        raise InvalidParameterError(f"Clip {clip} is smaller than the carrier {config.carrier}")
    positions, marks = _competitors(x, config)
    return ExactKernel().cell(x, positions, marks, clip, model)
