import math

import numpy as np
from scipy.spatial import cKDTree

from tesslab.core.geometry.cones import cone_bound
from tesslab.core.models.point import MarkedConfiguration

_FIRST_K = 32


class SpatialIndex:
    """k-d tree over a configuration answering the neighbour queries of the kernels."""

    def __init__(self, config: MarkedConfiguration) -> None:
        self._config = config
        self._tree = cKDTree(config.positions) if len(config) else None

    @property
    def config(self) -> MarkedConfiguration:
        return self._config

    def neighbors(self, position: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray]:
        """
        Points within radius of position, sorted by distance, the point at
        position itself excluded.
        """
        if self._tree is None:
            return np.empty((0, 2)), np.empty(0)
        if math.isfinite(radius):
            idx = np.asarray(self._tree.query_ball_point(position, radius), dtype=int)
        else:
            idx = np.arange(len(self._config))
        pts = self._config.positions[idx]
        dist = np.linalg.norm(pts - position, axis=1)
        order = np.lexsort((idx, dist))
        order = order[dist[order] > 0.0]
        return pts[order], self._config.marks[idx[order]]

    def diameter_bounds(self, positions: np.ndarray, mu: float) -> np.ndarray:
        """Cone bound D for each of the given positions (inf when unbounded)."""
        out = np.full(len(positions), np.inf)
        n = len(self._config)
        if self._tree is None or len(positions) == 0:
            return out

        pending = np.arange(len(positions))
        k = min(_FIRST_K, n)
        while pending.size:
            dist, idx = self.query(positions[pending], k)
            offsets = self._config.positions[idx] - positions[pending][:, None, :]
            bound = cone_bound(offsets, dist, mu)
            done = np.isfinite(bound)
            out[pending[done]] = bound[done]
            if k >= n:
                break
            pending = pending[~done]
            k = min(2 * k, n)
        return out

    def query(self, points: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
        """The k nearest points of each query as (m, k) distance and index arrays."""
        dist, idx = self._tree.query(points, k=k)
        return dist.reshape(len(points), k), idx.reshape(len(points), k)

    def nearest_distance(self, positions: np.ndarray) -> np.ndarray:
        if self._tree is None:
            return np.full(len(positions), np.inf)
        dist, _ = self._tree.query(positions, k=1)
        return np.asarray(dist).reshape(-1)
