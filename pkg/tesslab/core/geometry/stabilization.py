import logging
import math

import numpy as np

from tesslab.core.errors import InvalidParameterError, NotStabilizedError
from tesslab.core.geometry.cones import diameter_bound, stabilization_bound
from tesslab.core.geometry.index import SpatialIndex
from tesslab.core.geometry.tessellate import build_kernel
from tesslab.core.models.cell import Cell, CellShape, Kernel, WeightModel
from tesslab.core.models.point import MarkedConfiguration, MarkedPoint
from tesslab.core.pointproc.seeds import Seed, Stream, derive_rng, seed_path

logger = logging.getLogger("core.geometry.stabilization")

INSERT_BUDGET = 7


def _sorted(x: np.ndarray, positions: np.ndarray, marks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(np.linalg.norm(positions - x, axis=1), kind="stable")
    return positions[order], marks[order]


def stabilization_radius_empirical(
    x: MarkedPoint,
    config: MarkedConfiguration,
    model: WeightModel,
    insert_budget: int = INSERT_BUDGET,
    trials: int = 8,
    seed: Seed = 0,
    kernel: Kernel | None = None,
    mark_bound: float | None = None,
) -> float:
    """
    Smallest radius r of the doubling sequence started at the nearest
    neighbour distance such that the cell of x computed from the points in
    B_r(x) equals the cell from the whole carrier, and still does after
    `trials` random insertions of up to insert_budget points outside
    B_r(x). The search is capped by the certified radius 2 D + mu.
    """
    kernel = kernel or Kernel.exact()
    kernel.check(model)
    if not 0 <= insert_budget <= INSERT_BUDGET:
        raise InvalidParameterError(f"insert_budget must lie in [0, {INSERT_BUDGET}], got {insert_budget}")

    full = config if config.index_of(x) is not None else config.with_points([x])
    bound = full.mark_max if mark_bound is None else max(mark_bound, full.mark_max)
    mu = model.effective_mu(bound)
    center = np.asarray(x.position)
    d = diameter_bound(x, full, mu)
    certified = stabilization_bound(d, mu)
    carrier = full.carrier
    if not math.isfinite(d) or not carrier.contains_ball(center, certified):
        raise NotStabilizedError(f"Carrier {carrier} cannot certify the cell of {x} (D={d})")

    cells = build_kernel(kernel)
    positions, marks = SpatialIndex(full).neighbors(center, math.inf)
    dist = np.linalg.norm(positions - center, axis=1)
    reference = cells.cell(x, positions, marks, carrier, model)
    if reference.shape is CellShape.unbounded:
        raise NotStabilizedError(f"The cell of {x} reaches the carrier boundary")

    rng = derive_rng(seed_path(seed, Stream.insertion))

    def stable(r: float) -> bool:
        inner = dist <= r
        local = cells.cell(x, positions[inner], marks[inner], carrier, model)
        if not local.same_as(reference):
            return False
        for _ in range(trials):
            count = int(rng.integers(1, insert_budget + 1)) if insert_budget else 0
            if count == 0 or r >= certified:
                break
            radii = np.sqrt(rng.uniform(r * r, certified * certified, size=count))
            angles = rng.uniform(0.0, 2.0 * math.pi, size=count)
            extra = center + np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
            extra = extra[np.linalg.norm(extra - center, axis=1) > r]
            extra_marks = rng.uniform(0.0, bound, size=len(extra)) if bound > 0 else np.zeros(len(extra))
            p, m = _sorted(center, np.vstack([positions, extra]), np.concatenate([marks, extra_marks]))
            if not cells.cell(x, p, m, carrier, model).same_as(local):
                return False
        return True

    r = float(dist[0]) if len(dist) else certified
    while True:
        r = min(r, certified)
        if stable(r):
            logger.debug(f"Cell of {x} stabilizes at r={r:.6g} (certified {certified:.6g})")
            return r
        if r >= certified:
            raise NotStabilizedError(f"Cell of {x} did not stabilize within {certified}")
        r *= 2.0


def local_cell(x: MarkedPoint, config: MarkedConfiguration, model: WeightModel, radius: float, kernel: Kernel) -> Cell:
    """Cell of x computed from the points of config within radius of x only."""
    center = np.asarray(x.position)
    positions, marks = SpatialIndex(config).neighbors(center, radius)
    return build_kernel(kernel).cell(x, positions, marks, config.carrier, model)
