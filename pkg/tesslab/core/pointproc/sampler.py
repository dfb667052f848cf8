import logging
import math
from collections.abc import Sequence

import numpy as np

from tesslab.core.errors import InvalidParameterError
from tesslab.core.models.point import Box, MarkDistribution, MarkedConfiguration
from tesslab.core.pointproc.seeds import Seed, Stream, derive_rng, seed_path

logger = logging.getLogger("core.pointproc.sampler")

_MAX_RESAMPLE_ROUNDS = 16


def _uniform_positions(rng: np.random.Generator, region: Box, n: int) -> np.ndarray:
    lower = np.asarray(region.lower)
    return lower + rng.random((n, region.dim)) * np.asarray(region.sides)


def _reject_duplicates(rng: np.random.Generator, region: Box, positions: np.ndarray) -> np.ndarray:
    for _ in range(_MAX_RESAMPLE_ROUNDS):
        _, first = np.unique(positions, axis=0, return_index=True)
        if len(first) == len(positions):
            return positions
        dup = np.setdiff1d(np.arange(len(positions)), first)
        logger.debug(f"Resampling {len(dup)} duplicate positions")
        positions[dup] = _uniform_positions(rng, region, len(dup))
    raise InvalidParameterError(f"Could not draw distinct positions on {region}")


def sample_poisson(region: Box, intensity: float, marks: MarkDistribution, seed: Seed) -> MarkedConfiguration:
    """
    Homogeneous marked Poisson process on region: a Poisson(intensity *
    volume) count of i.i.d. uniform positions carrying i.i.d. marks.
    """
    if not (intensity > 0 and math.isfinite(intensity)):
        raise InvalidParameterError(f"Intensity must be finite and > 0, got {intensity}")

    rng = derive_rng(seed_path(seed, 0))
    n = int(rng.poisson(intensity * region.volume))
    positions = _reject_duplicates(rng, region, _uniform_positions(rng, region, n))
    drawn = marks.sample(derive_rng(seed_path(seed, 1)), n)
    return MarkedConfiguration(positions, drawn, region)


def sample_guarded(
    window: Box,
    guard: float,
    intensity: float,
    marks: MarkDistribution,
    seed: Seed,
) -> MarkedConfiguration:
    """Poisson sample on the window dilated by guard in every coordinate."""
    return sample_poisson(window.dilate(guard), intensity, marks, seed)


def _frame(inner: Box, outer: Box) -> list[Box]:
    """Disjoint slabs covering outer minus inner."""
    slabs: list[Box] = []
    lower, upper = list(outer.lower), list(outer.upper)
    for axis in range(outer.dim):
        if outer.lower[axis] < inner.lower[axis]:
            hi = list(upper)
            hi[axis] = inner.lower[axis]
            slabs.append(Box(tuple(lower), tuple(hi)))
        if inner.upper[axis] < outer.upper[axis]:
            lo = list(lower)
            lo[axis] = inner.upper[axis]
            slabs.append(Box(tuple(lo), tuple(upper)))
        lower[axis], upper[axis] = inner.lower[axis], inner.upper[axis]
    return slabs


def extend_carrier(
    config: MarkedConfiguration,
    carrier: Box,
    intensity: float,
    marks: MarkDistribution,
    seed: Seed,
) -> MarkedConfiguration:
    """
    Grow the carrier of a Poisson sample, sampling only the new frame.
    Points already drawn are kept, so the enlarged configuration is again a
    Poisson sample on the new carrier.
    """
    if not carrier.contains_box(config.carrier):
        raise InvalidParameterError(f"{carrier} does not contain {config.carrier}")

    extended = config
    for k, slab in enumerate(_frame(config.carrier, carrier)):
        part = sample_poisson(slab, intensity, marks, seed_path(seed, Stream.guard_extension, k))
        # slabs share faces with the old carrier; a hit on a face has probability zero
        keep = ~config.carrier.contains(part.positions) if len(part) else np.zeros(0, dtype=bool)
        extended = extended.merge(part.subset(keep), carrier)
    if len(extended) == len(config):
        return MarkedConfiguration(config.positions, config.marks, carrier)
    return extended


def translate(config: MarkedConfiguration, v: Sequence[float]) -> MarkedConfiguration:
    shift = np.asarray(v, dtype=float)
    return MarkedConfiguration(config.positions + shift, config.marks.copy(), config.carrier.translate(v))


def lattice_fixture(window: Box, spacing: float, mark: float, dilation: float | None = None) -> MarkedConfiguration:
    """
    Integer lattice points k * spacing covering the window dilated by
    dilation (12 spacings plus four marks unless given), all with one mark.
    """
    if spacing <= 0:
        raise InvalidParameterError(f"Spacing must be > 0, got {spacing}")

    carrier = window.dilate(12 * spacing + 4 * mark if dilation is None else dilation)
    axes = [
        np.arange(math.ceil(lo / spacing), math.floor(hi / spacing) + 1) * spacing
        for lo, hi in zip(carrier.lower, carrier.upper)
    ]
    grid = np.meshgrid(*axes, indexing="ij")
    positions = np.column_stack([g.ravel() for g in grid])
    return MarkedConfiguration(positions, np.full(len(positions), float(mark)), carrier)
