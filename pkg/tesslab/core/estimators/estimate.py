import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, replace

import numpy as np

from tesslab.core.errors import GuardTooSmallError, InvalidParameterError
from tesslab.core.estimators.characteristic import evaluate, indicator
from tesslab.core.estimators.erosion import contained, erosion_volume
from tesslab.core.geometry.cones import stabilization_bound
from tesslab.core.geometry.tessellate import Tessellator, winner_reach
from tesslab.core.models.cell import Cell, CellShape, Kernel, WeightModel
from tesslab.core.models.characteristic import Characteristic
from tesslab.core.models.estimate import Contribution, EstimateResult, EstimatorKind, Exclusion
from tesslab.core.models.point import Box, MarkedConfiguration, MarkedPoint

logger = logging.getLogger("core.estimators.estimate")

_COVERAGE_POINTS = 1 << 20


@dataclass(frozen=True, slots=True)
class CellDecision:
    """The cell of one scoped generator and the verdict on its inclusion."""
    generator: MarkedPoint
    cell: Cell
    erosion: float
    reason: Exclusion | None

    @property
    def included(self) -> bool:
        return self.reason is None


@dataclass(frozen=True, slots=True)
class Ledger:
    lam: float
    kind: EstimatorKind
    decisions: tuple[CellDecision, ...]
    n_out_of_scope: int


def coverage_radius(tessellator: Tessellator, window: Box) -> float:
    """
    Upper bound on the distance from any location of window to its nearest
    generator: the largest nearest-generator distance over a grid of window
    plus half the diagonal of a grid square.
    """
    config = tessellator.config
    density = len(config) / config.carrier.volume
    side = 0.5 / math.sqrt(density)
    side = max(side, math.sqrt(window.volume / _COVERAGE_POINTS))
    counts = [max(1, math.ceil(s / side)) for s in window.sides]
    steps = [s / n for s, n in zip(window.sides, counts)]
    axes = [lo + (np.arange(n) + 0.5) * step for lo, n, step in zip(window.lower, counts, steps)]
    grid = np.meshgrid(*axes, indexing="ij")
    centers = np.column_stack([g.ravel() for g in grid])
    slack = 0.5 * math.hypot(*steps)
    return float(tessellator.index.nearest_distance(centers).max()) + slack


def _scope(tessellator: Tessellator, window: Box, kind: EstimatorKind) -> np.ndarray:
    positions = tessellator.config.positions
    in_window = window.contains(positions)
    if not kind.full:
        return in_window
    reach = winner_reach(coverage_radius(tessellator, window), tessellator.mu, tessellator.model)
    return in_window | (window.distance(positions) <= reach)


def _inside(window: Box, cell: Cell) -> bool:
    if cell.shape is CellShape.polygon:
        return bool(window.contains(cell.vertices).all())
    return contained(window, cell.bounding_box(), shell=cell.grid_h)


def _decide(window: Box, lam: float, kind: EstimatorKind, cell: Cell) -> tuple[float, Exclusion | None]:
    match cell.shape:
        case CellShape.empty:
            return math.nan, Exclusion.empty
        case CellShape.unbounded:
            return math.nan, Exclusion.unbounded
    if kind is EstimatorKind.naive:
        return math.nan, None
    erosion = erosion_volume(window, cell.bounding_box())
    if not _inside(window, cell) or erosion <= 0.0:
        return erosion, Exclusion.not_contained
    if kind.truncated and erosion < lam / 2.0:
        return erosion, Exclusion.below_threshold
    return erosion, None


def build_ledger(
    config: MarkedConfiguration,
    window: Box,
    model: WeightModel,
    kind: EstimatorKind,
    kernel: Kernel,
    mark_bound: float | None = None,
) -> Ledger:
    """
    Cells and inclusion verdicts of every generator in scope, sorted by
    (position, mark). Every scoped cell must be certified by its cone bound
    within the carrier.
    """
    lam = window.volume
    if len(config) == 0:
        return Ledger(lam, kind, (), 0)
    if not config.carrier.contains_box(window):
        raise InvalidParameterError(f"Carrier {config.carrier} does not contain the window {window}")

    tessellator = Tessellator(config, model, kernel, mark_bound)
    scoped = np.flatnonzero(_scope(tessellator, window, kind))
    positions, marks = config.positions[scoped], config.marks[scoped]
    scoped = scoped[np.lexsort((marks, positions[:, 1], positions[:, 0]))]
    bounds = tessellator.diameter_bounds(config.positions[scoped])

    decisions = []
    for i, d in zip(scoped, bounds):
        x = config.point(int(i))
        if not tessellator.certified(config.positions[i], d):
            radius = stabilization_bound(d, tessellator.mu)
            raise GuardTooSmallError(f"Cell of {x} is not certified within {config.carrier} (2D+mu={radius})", radius)
        cell = tessellator.cell(x, float(d))
        erosion, reason = _decide(window, lam, kind, cell)
        decisions.append(CellDecision(x, cell, erosion, reason))

    n_out = len(config) - len(scoped) if kind.full else 0
    logger.debug(f"{kind} ledger: {len(decisions)} scoped generators, {n_out} out of scope")
    return Ledger(lam, kind, tuple(decisions), n_out)


def estimate(
    config: MarkedConfiguration,
    window: Box,
    model: WeightModel,
    h: Characteristic,
    kind: EstimatorKind,
    kernel: Kernel,
    mark_bound: float | None = None,
) -> EstimateResult:
    """
    Minus-sampling estimate sum h(C) / Vol(W - C) over the included cells,
    or lambda^-1 times the sum of scores over the window for the naive kind.
    """
    ledger = build_ledger(config, window, model, kind, kernel, mark_bound)
    contributions = tuple(
        Contribution(d.generator, evaluate(h, d.cell), d.erosion, d.included, d.reason)
        for d in ledger.decisions
    )
    result = EstimateResult(0.0, ledger.lam, kind, contributions, ledger.n_out_of_scope)
    return replace(result, value=result.recompute())


def estimate_distribution_function(
    config: MarkedConfiguration,
    window: Box,
    model: WeightModel,
    t_grid: Sequence[float],
    kind: EstimatorKind,
    kernel: Kernel,
    base: Characteristic | None = None,
    mark_bound: float | None = None,
) -> list[tuple[float, float]]:
    """
    Estimates of P(base(K0) <= t) for every t of t_grid, volume by default,
    from one tessellation pass.
    """
    if any(not t > 0 for t in t_grid):
        raise InvalidParameterError("Thresholds must be > 0")
    base = base or Characteristic.volume()
    if base.is_indicator:
        raise InvalidParameterError("Indicators cannot be nested")

    ledger = build_ledger(config, window, model, kind, kernel, mark_bound)
    included = [d for d in ledger.decisions if d.included]
    values = [evaluate(base, d.cell) for d in included]
    out = []
    for t in t_grid:
        if kind is EstimatorKind.naive:
            value = math.fsum(indicator(v, t) for v in values) / ledger.lam
        else:
            value = math.fsum(indicator(v, t) / d.erosion for v, d in zip(values, included))
        out.append((float(t), value))
    return out
