import logging
import math

import numpy as np

from tesslab.core.errors import InvalidParameterError
from tesslab.core.geometry.power import power_field, security_radius
from tesslab.core.models.cell import Cell, WeightModel
from tesslab.core.models.point import Box, MarkedConfiguration, MarkedPoint

_CROP_EVERY = 8


def grid_shape(clip: Box, grid_h: float) -> tuple[int, int]:
    """Number of whole grid squares along each axis of clip."""
    return tuple(max(1, int(math.floor(side / grid_h + 1e-9))) for side in clip.sides)


def grid_centers(clip: Box, grid_h: float, i0: int, i1: int, j0: int, j1: int) -> tuple[np.ndarray, np.ndarray]:
    """Column of x centers for rows i0..i1-1 and row of y centers for j0..j1-1."""
    xs = clip.lower[0] + (np.arange(i0, i1) + 0.5) * grid_h
    ys = clip.lower[1] + (np.arange(j0, j1) + 0.5) * grid_h
    return xs[:, None], ys[None, :]


def reaches_grid_edge(cell: Cell, clip: Box) -> bool:
    """Whether the mask of a raster cell covers a square of the outer ring of the grid of clip."""
    nx, ny = grid_shape(clip, cell.grid_h)
    i0, j0 = (round((o - lo) / cell.grid_h) for o, lo in zip(cell.origin, clip.lower))
    rows, cols = cell.mask.shape
    return i0 <= 0 or j0 <= 0 or i0 + rows >= nx or j0 + cols >= ny


class RasterKernel:
    """
    Cells as boolean masks over the square grid of side grid_h anchored at
    the lower corner of the clip box. A square belongs to the generator when
    its center has minimal weight, ties going to the lexicographically
    smaller (position, mark).
    """

    def __init__(self, grid_h: float) -> None:
        if not grid_h > 0:
            raise InvalidParameterError(f"grid_h must be > 0, got {grid_h}")
        self._grid_h = grid_h
        self._logger = logging.getLogger("core.geometry.raster")

    @property
    def grid_h(self) -> float:
        return self._grid_h

    def _window(self, clip: Box, center: np.ndarray, reach: float) -> tuple[int, int, int, int]:
        h = self._grid_h
        nx, ny = grid_shape(clip, h)
        if not math.isfinite(reach):
            return 0, nx, 0, ny
        lo = np.floor((center - reach - np.asarray(clip.lower)) / h).astype(int)
        hi = np.ceil((center + reach - np.asarray(clip.lower)) / h).astype(int)
        return max(0, lo[0]), min(nx, hi[0]), max(0, lo[1]), min(ny, hi[1])

    def cell(
        self,
        generator: MarkedPoint,
        positions: np.ndarray,
        marks: np.ndarray,
        clip: Box,
        model: WeightModel,
        reach: float = math.inf,
    ) -> Cell:
        h = self._grid_h
        x = np.asarray(generator.position)
        nx, ny = grid_shape(clip, h)
        i0, i1, j0, j1 = self._window(clip, x, reach)
        if i0 >= i1 or j0 >= j1:
            return Cell.empty(generator)

        xs, ys = grid_centers(clip, h, i0, i1, j0, j1)
        own = power_field(xs, ys, x, generator.mark, model)
        mask = np.ones(own.shape, dtype=bool)
        mu = float(marks.max()) if len(marks) else 0.0
        dist = np.linalg.norm(positions - x, axis=1) if len(positions) else np.empty(0)
        radius = math.inf

        for k in range(len(positions)):
            if dist[k] > security_radius(radius, mu, model):
                break
            z = positions[k]
            theirs = power_field(xs, ys, z, marks[k], model)
            if (float(z[0]), float(z[1]), float(marks[k])) < (*generator.position, generator.mark):
                mask &= own < theirs
            else:
                mask &= own <= theirs

            if (k + 1) % _CROP_EVERY == 0:
                if not mask.any():
                    return Cell.empty(generator)
                rows = np.flatnonzero(mask.any(axis=1))
                cols = np.flatnonzero(mask.any(axis=0))
                r0, r1, c0, c1 = rows[0], rows[-1] + 1, cols[0], cols[-1] + 1
                mask, own = mask[r0:r1, c0:c1], own[r0:r1, c0:c1]
                xs, ys = xs[r0:r1], ys[:, c0:c1]
                i0, j0 = i0 + r0, j0 + c0
                i1, j1 = i0 + mask.shape[0], j0 + mask.shape[1]
                ci, cj = np.nonzero(mask)
                radius = float(np.hypot(xs[ci, 0] - x[0], ys[0, cj] - x[1]).max())

        if not mask.any():
            return Cell.empty(generator)
        rows = np.flatnonzero(mask.any(axis=1))
        cols = np.flatnonzero(mask.any(axis=0))
        if (i0 + rows[0] == 0 or i0 + rows[-1] == nx - 1
                or j0 + cols[0] == 0 or j0 + cols[-1] == ny - 1):
            return Cell.unbounded(generator)

        mask = mask[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1]
        origin = (clip.lower[0] + (i0 + rows[0]) * h, clip.lower[1] + (j0 + cols[0]) * h)
        return Cell.raster(generator, origin, h, mask)


def cell_raster(x: MarkedPoint, config: MarkedConfiguration, model: WeightModel, grid_h: float, clip: Box) -> Cell:
    """Raster cell of x in config over the grid of clip."""
    others = config.without(x)
    order = np.argsort(np.linalg.norm(others.positions - np.asarray(x.position), axis=1), kind="stable")
    return RasterKernel(grid_h).cell(x, others.positions[order], others.marks[order], clip, model)
