import math
from collections.abc import Sequence

import numpy as np

from tesslab.core.errors import DegenerateInputError, InvalidParameterError
from tesslab.core.models.cell import HalfSpace2, WeightModel
from tesslab.core.models.point import MarkedPoint


def power(y: Sequence[float], p: MarkedPoint, model: WeightModel) -> float:
    """Weight rho(y, p) of location y with respect to the generator p."""
    dist = math.dist(y, p.position)
    match model:
        case WeightModel.voronoi:
            return dist
        case WeightModel.laguerre:
            return dist * dist - p.mark * p.mark
        case _:
            return dist - p.mark


def power_field(xs: np.ndarray, ys: np.ndarray, position: Sequence[float], mark: float, model: WeightModel) -> np.ndarray:
    """rho over the broadcast grid of xs (column) and ys (row) coordinates."""
    dx = xs - position[0]
    dy = ys - position[1]
    match model:
        case WeightModel.voronoi:
            return np.hypot(dx, dy)
        case WeightModel.laguerre:
            return dx * dx + dy * dy - mark * mark
        case _:
            return np.hypot(dx, dy) - mark


def bisector(a: MarkedPoint, b: MarkedPoint, model: WeightModel) -> HalfSpace2:
    """The half-plane of locations at least as close (in rho) to a as to b."""
    if not model.has_linear_bisectors:
        raise InvalidParameterError("Johnson-Mehl bisectors are not straight lines")
    if a.position == b.position:
        raise DegenerateInputError(f"Coincident generators at {a.position}")

    (ax, ay), (bx, by) = a.position, b.position
    offset = (bx * bx + by * by - ax * ax - ay * ay) / 2.0
    if model is WeightModel.laguerre:
        offset += (a.mark * a.mark - b.mark * b.mark) / 2.0
    return HalfSpace2((bx - ax, by - ay), offset)


def security_radius(r: float, mu: float, model: WeightModel) -> float:
    """
    Distance beyond which a generator with mark <= mu cannot beat a
    generator on any location within r of it.
    """
    match model:
        case WeightModel.voronoi:
            return 2.0 * r
        case WeightModel.laguerre:
            return r + math.sqrt(r * r + mu * mu)
        case _:
            return 2.0 * r + mu
