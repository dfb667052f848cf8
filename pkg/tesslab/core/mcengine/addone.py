import logging
import math
from collections.abc import Sequence

import numpy as np

from tesslab.core.errors import InvalidParameterError
from tesslab.core.estimators.characteristic import evaluate
from tesslab.core.geometry.tessellate import Tessellator
from tesslab.core.models.cell import Kernel, WeightModel
from tesslab.core.models.characteristic import Characteristic
from tesslab.core.models.point import Box, MarkedConfiguration, MarkedPoint

logger = logging.getLogger("core.mcengine.addone")

ADVISORY_EXTRA_POINTS = 7


def total_score(config: MarkedConfiguration, model: WeightModel, h: Characteristic, kernel: Kernel) -> float:
    """Sum of the scores of every point of a finite configuration."""
    if len(config) == 0:
        return 0.0
    cells = Tessellator(config, model, kernel).cells()
    return math.fsum(evaluate(h, cell) for _, cell in cells)


def _clip_box(points: np.ndarray, mu: float) -> Box:
    span = float(np.ptp(points, axis=0).max()) if len(points) > 1 else 0.0
    return Box.around(points, max(2.0 * span + 2.0 * mu, 1.0))


def add_one_cost(
    config: MarkedConfiguration,
    ball_radius_S: float,
    extra_points: Sequence[MarkedPoint],
    model: WeightModel,
    h: Characteristic,
    kernel: Kernel,
    origin_mark: float = 0.0,
) -> float:
    """
    Change of the total score of (config n B_S) + extra caused by inserting
    (0, origin_mark). Cells are those of the finite union configurations;
    cells reaching the clip box score 0.
    """
    if ball_radius_S <= 0:
        raise InvalidParameterError(f"Ball radius must be > 0, got {ball_radius_S}")
    for p in extra_points:
        if math.hypot(*p.position) <= ball_radius_S:
            raise InvalidParameterError(f"Extra point {p} lies inside B_S(0)")

    if len(extra_points) > ADVISORY_EXTRA_POINTS:
        logger.warning(f"{len(extra_points)} extra points exceed the advisory budget of {ADVISORY_EXTRA_POINTS}")

    origin = MarkedPoint((0.0, 0.0), origin_mark)
    local = config.within((0.0, 0.0), ball_radius_S)
    base = [p for p in local if p.position != origin.position] + list(extra_points)
    with_origin = [*base, origin]

    positions = np.array([p.position for p in with_origin], dtype=float)
    mu = max(p.mark for p in with_origin)
    clip = _clip_box(positions, mu)
    before = total_score(MarkedConfiguration.from_points(base, clip), model, h, kernel) if base else 0.0
    after = total_score(MarkedConfiguration.from_points(with_origin, clip), model, h, kernel)
    return after - before
