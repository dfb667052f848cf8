import logging
import math

import numpy as np
from scipy import ndimage

from tesslab.core.errors import InvalidParameterError
from tesslab.core.geometry.cones import stabilization_bound
from tesslab.core.geometry.exact import ExactKernel
from tesslab.core.geometry.index import SpatialIndex
from tesslab.core.geometry.raster import RasterKernel, grid_centers, grid_shape
from tesslab.core.models.cell import Cell, Kernel, KernelMethod, WeightModel
from tesslab.core.models.point import Box, MarkedConfiguration, MarkedPoint
from tesslab.core.ports.kernel import CellKernel

_CHUNK = 1 << 18


def build_kernel(kernel: Kernel) -> CellKernel:
    if kernel.method is KernelMethod.raster:
        return RasterKernel(kernel.grid_h)
    return ExactKernel()


def winner_reach(delta: np.ndarray | float, mu: float, model: WeightModel) -> np.ndarray | float:
    """
    Distance within which the rho-minimizing generator of a location lies,
    given the distance delta to its nearest generator.
    """
    match model:
        case WeightModel.voronoi:
            return delta
        case WeightModel.laguerre:
            return np.sqrt(np.square(delta) + mu * mu)
        case _:
            return delta + mu


class Tessellator:
    """
    Cells of the generators of one configuration. Competitors are read from
    a k-d tree; a cell with a finite cone bound D only looks at the points
    within 2 D + mu.
    """

    def __init__(
        self,
        config: MarkedConfiguration,
        model: WeightModel,
        kernel: Kernel,
        mark_bound: float | None = None,
    ) -> None:
        kernel.check(model)
        self._config = config
        self._model = model
        self._kernel = kernel
        self._cells = build_kernel(kernel)
        self._index = SpatialIndex(config)
        bound = config.mark_max if mark_bound is None else max(mark_bound, config.mark_max)
        self._mu = model.effective_mu(bound)
        self._logger = logging.getLogger("core.geometry.tessellate")

    @property
    def config(self) -> MarkedConfiguration:
        return self._config

    @property
    def index(self) -> SpatialIndex:
        return self._index

    @property
    def mu(self) -> float:
        return self._mu

    @property
    def model(self) -> WeightModel:
        return self._model

    def diameter_bounds(self, positions: np.ndarray) -> np.ndarray:
        return self._index.diameter_bounds(positions, self._mu)

    def certified(self, position: np.ndarray, d: float) -> bool:
        """The carrier covers the stabilization ball B_{2D + mu} of position."""
        return math.isfinite(d) and self._config.carrier.contains_ball(position, stabilization_bound(d, self._mu))

    def cell(self, x: MarkedPoint, d: float = math.inf) -> Cell:
        """
        Cell of x, which must belong to the configuration. With a certified
        bound d only the competitors within 2 d + mu are consulted.
        """
        position = np.asarray(x.position)
        radius = stabilization_bound(d, self._mu) if math.isfinite(d) else math.inf
        positions, marks = self._index.neighbors(position, radius)
        return self._cells.cell(x, positions, marks, self._config.carrier, self._model, reach=d)

    def cells(self) -> list[tuple[MarkedPoint, Cell]]:
        bounds = self.diameter_bounds(self._config.positions)
        out = []
        for i, x in enumerate(self._config):
            d = bounds[i] if self.certified(self._config.positions[i], bounds[i]) else math.inf
            out.append((x, self.cell(x, d)))
        return out

    def winner_map(self, window: Box, grid_h: float) -> np.ndarray:
        """
        Index of the rho-minimizing generator at every square center of the
        grid of window; ties go to the lexicographically smaller generator.
        """
        config = self._config
        n = len(config)
        if n == 0:
            raise InvalidParameterError("Cannot assign a grid without generators")
        nx, ny = grid_shape(window, grid_h)
        xs, ys = grid_centers(window, grid_h, 0, nx, 0, ny)
        centers = np.column_stack([np.repeat(xs[:, 0], ny), np.tile(ys[0], nx)])

        order = np.lexsort((config.marks, config.positions[:, 1], config.positions[:, 0]))
        rank = np.empty(n, dtype=int)
        rank[order] = np.arange(n)

        winners = np.empty(len(centers), dtype=int)
        for start in range(0, len(centers), _CHUNK):
            winners[start:start + _CHUNK] = self._assign(centers[start:start + _CHUNK], rank)
        return winners.reshape(nx, ny)

    def _assign(self, points: np.ndarray, rank: np.ndarray) -> np.ndarray:
        n = len(self._config)
        out = np.empty(len(points), dtype=int)
        pending = np.arange(len(points))
        k = min(16, n)
        while pending.size:
            dist, idx = self._index.query(points[pending], k)
            marks = self._config.marks[idx]
            match self._model:
                case WeightModel.voronoi:
                    pw = dist
                case WeightModel.laguerre:
                    pw = dist * dist - marks * marks
                case _:
                    pw = dist - marks
            best = pw.min(axis=1, keepdims=True)
            ranked = np.where(pw == best, rank[idx], n)
            choice = idx[np.arange(len(pending)), ranked.argmin(axis=1)]
            complete = (dist[:, -1] > winner_reach(dist[:, 0], self._mu, self._model)) | (k >= n)
            out[pending[complete]] = choice[complete]
            pending = pending[~complete]
            k = min(2 * k, n)
        return out

    def raster_partition(self, window: Box, grid_h: float) -> list[tuple[MarkedPoint, Cell]]:
        """
        Masks of the window grid per generator, restricted to the window;
        generators owning no square get Empty.
        """
        if len(self._config) == 0:
            return []
        winners = self.winner_map(window, grid_h)
        slices = ndimage.find_objects(winners + 1, max_label=len(self._config))
        out = []
        for i, x in enumerate(self._config):
            box = slices[i]
            if box is None:
                out.append((x, Cell.empty(x)))
                continue
            rows, cols = box
            mask = winners[box] == i
            origin = (window.lower[0] + rows.start * grid_h, window.lower[1] + cols.start * grid_h)
            out.append((x, Cell.raster(x, origin, grid_h, mask)))
        return out


def tessellate(config: MarkedConfiguration, window: Box, model: WeightModel, method: Kernel) -> list[tuple[MarkedPoint, Cell]]:
    """
    One (generator, cell) entry per generator of the carrier. Exact cells
    are clipped to the carrier; raster cells partition the grid of window.
    """
    tessellator = Tessellator(config, model, method)
    if method.method is KernelMethod.raster:
        return tessellator.raster_partition(window, method.grid_h)
    return tessellator.cells()
