import logging
import math
from dataclasses import dataclass

import numpy as np

from tesslab.core.errors import InvalidParameterError, NotStabilizedError
from tesslab.core.geometry.tessellate import Tessellator
from tesslab.core.models.cell import Cell, CellShape, Kernel, WeightModel
from tesslab.core.models.point import Box, MarkDistribution, MarkedConfiguration, MarkedPoint
from tesslab.core.pointproc.sampler import extend_carrier, sample_poisson
from tesslab.core.pointproc.seeds import Seed, Stream, derive_rng, seed_path

logger = logging.getLogger("core.mcengine.typical")

DEFAULT_GUARD = 6.0
"""Guard of a typical-cell draw, in units of intensity^(-1/2)."""

_ORIGIN = np.zeros(2)


def origin_box(radius: float) -> Box:
    return Box((-radius, -radius), (radius, radius))


def default_guard(mark_dist: MarkDistribution, intensity: float = 1.0) -> float:
    return DEFAULT_GUARD / math.sqrt(intensity) + 2.0 * mark_dist.mu_bound


@dataclass(frozen=True, slots=True)
class TypicalDraw:
    """A marked point inserted at the origin of a Poisson sample, and its cell."""
    cell: Cell
    d_bound: float
    """Cone bound D of the origin cell in the final carrier."""

    guard: float
    """Half side of the final carrier."""

    config: MarkedConfiguration

    @property
    def rejected(self) -> bool:
        return self.cell.shape is CellShape.unbounded

    @property
    def origin(self) -> MarkedPoint:
        return self.cell.generator


def draw_typical(
    model: WeightModel,
    mark_dist: MarkDistribution,
    guard: float,
    seed: Seed,
    kernel: Kernel,
    intensity: float = 1.0,
    max_doublings: int = 3,
    cap: float | None = None,
) -> TypicalDraw:
    """
    Insert (0, M0) with M0 drawn from mark_dist into a Poisson sample on
    [-guard, guard]^2 and compute its cell. While the cone bound is not
    certified the carrier is doubled, sampling only the added frame, up to
    max_doublings times or until the cap; past that the cell is reported
    Unbounded.
    """
    if not guard > 0:
        raise InvalidParameterError(f"Typical-cell guard must be > 0, got {guard}")
    kernel.check(model)
    cap = guard * 2 ** max_doublings if cap is None else cap

    rng = derive_rng(seed_path(seed, Stream.typical))
    origin = MarkedPoint((0.0, 0.0), float(mark_dist.sample(rng, 1)[0]))
    sample = sample_poisson(origin_box(guard), intensity, mark_dist, seed_path(seed, Stream.sample))
    config = sample.with_points([origin])

    g = guard
    d = math.inf
    for attempt in range(max_doublings + 1):
        tessellator = Tessellator(config, model, kernel, mark_bound=mark_dist.mu_bound)
        d = float(tessellator.diameter_bounds(_ORIGIN[None])[0])
        if tessellator.certified(_ORIGIN, d):
            return TypicalDraw(tessellator.cell(origin, d), d, g, config)
        if attempt == max_doublings or 2.0 * g > cap:
            break
        g *= 2.0
        config = extend_carrier(config, origin_box(g), intensity, mark_dist, seed_path(seed, Stream.sample, attempt + 1))

    logger.debug(f"Typical draw {seed} not certified at guard {g} (D={d})")
    return TypicalDraw(Cell.unbounded(origin), d, g, config)


def sample_typical_cell(
    model: WeightModel,
    mark_dist: MarkDistribution,
    guard: float,
    seed: Seed,
    kernel: Kernel,
    intensity: float = 1.0,
    strict: bool = True,
    max_doublings: int = 3,
    cap: float | None = None,
) -> Cell:
    """
    Cell of a point inserted at the origin of a fresh Poisson sample; its
    law is that of the typical cell. Non-strict callers get Unbounded for
    draws the guard cannot certify and count them.
    """
    draw = draw_typical(model, mark_dist, guard, seed, kernel, intensity, max_doublings, cap)
    if strict and draw.rejected:
        raise NotStabilizedError(f"Typical cell not certified within guard {draw.guard}")
    return draw.cell
