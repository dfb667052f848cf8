import math

import numpy as np

from tesslab.core.models.point import MarkedConfiguration, MarkedPoint

CONE_COUNT = 9
"""Equal angular sectors of half-angle 20 degrees; two vectors of one sector
satisfy <x, y> >= 3/4 |x| |y|."""

_SECTOR = 2.0 * math.pi / CONE_COUNT


def sector_of(offsets: np.ndarray) -> np.ndarray:
    angle = np.mod(np.arctan2(offsets[..., 1], offsets[..., 0]), 2.0 * math.pi)
    return np.minimum((angle // _SECTOR).astype(int), CONE_COUNT - 1)


def cone_bound(offsets: np.ndarray, dist: np.ndarray, mu: float) -> np.ndarray:
    """
    D = 2 max_j |x_j| where x_j is the nearest offset in cone j farther than
    2 mu. offsets has shape (m, k, 2) and dist (m, k); rows missing a cone
    witness get inf.
    """
    valid = dist > 2.0 * mu
    sectors = sector_of(offsets)
    best = np.full(dist.shape[:-1] + (CONE_COUNT,), np.inf)
    for j in range(CONE_COUNT):
        best[..., j] = np.where(valid & (sectors == j), dist, np.inf).min(axis=-1, initial=np.inf)
    return 2.0 * best.max(axis=-1)


def diameter_bound(x: MarkedPoint, config: MarkedConfiguration, mu: float) -> float:
    """
    Cone bound D of the cell of x: the cell lies in the ball B_D(x). Returns
    inf when some cone holds no point of config beyond 2 mu.
    """
    if len(config) == 0:
        return math.inf
    offsets = config.positions - np.asarray(x.position)
    dist = np.hypot(offsets[:, 0], offsets[:, 1])
    return float(cone_bound(offsets[None], dist[None], mu)[0])


def stabilization_bound(d: float, mu: float) -> float:
    """Certified radius of stabilization R = 2 D + mu."""
    return 2.0 * d + mu
