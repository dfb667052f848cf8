import math

from tesslab.core.estimators.characteristic import evaluate
from tesslab.core.geometry.tessellate import Tessellator
from tesslab.core.models.cell import Cell, Kernel, WeightModel
from tesslab.core.models.characteristic import Characteristic
from tesslab.core.models.point import MarkedConfiguration, MarkedPoint


def cell_of(
    x: MarkedPoint,
    config: MarkedConfiguration,
    model: WeightModel,
    kernel: Kernel,
    mark_bound: float | None = None,
) -> Cell:
    """
    Cell of x in config with x inserted when absent, read within the
    certified ball when the cone bound covers it.
    """
    full = config if config.index_of(x) is not None else config.with_points([x])
    tessellator = Tessellator(full, model, kernel, mark_bound)
    position = full.positions[full.index_of(x)]
    d = float(tessellator.diameter_bounds(position[None])[0])
    if not tessellator.certified(position, d):
        d = math.inf
    return tessellator.cell(x, d)


def score_xi(
    h: Characteristic,
    x: MarkedPoint,
    config: MarkedConfiguration,
    model: WeightModel,
    kernel: Kernel,
    mark_bound: float | None = None,
) -> float:
    """xi(x, config) = h(C(x, config)) * 1{C(x, config) bounded}."""
    return evaluate(h, cell_of(x, config, model, kernel, mark_bound))
