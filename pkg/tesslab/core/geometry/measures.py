"""
Geometric measures of polygon and raster cells.

Raster contours follow marching squares on the cell-center samples with
midpoint interpolation; enclosing circles follow Welzl's incremental
construction on the convex hull.
"""
import math
from collections.abc import Sequence

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull, QhullError

from tesslab.core.geometry.clipping import box_polygon, clip_polygon
from tesslab.core.models.point import Box

type Circle = tuple[float, float, float]

_INRADIUS_TOL = 1e-9
_MULTIPLICATIVE_EPSILON = 1 + 1e-14


def polygon_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_perimeter(v: np.ndarray) -> float:
    step = np.roll(v, -1, axis=0) - v
    return float(np.hypot(step[:, 0], step[:, 1]).sum())


def max_pairwise_distance(points: np.ndarray) -> float:
    if len(points) < 2:
        return 0.0
    diff = points[:, None, :] - points[None, :, :]
    return float(np.sqrt((diff ** 2).sum(axis=-1)).max())


def _in_circle(c: Circle | None, p: Sequence[float]) -> bool:
    return c is not None and math.hypot(p[0] - c[0], p[1] - c[1]) <= c[2] * _MULTIPLICATIVE_EPSILON


def _diameter_circle(a: Sequence[float], b: Sequence[float]) -> Circle:
    cx, cy = (a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0
    return cx, cy, max(math.hypot(cx - a[0], cy - a[1]), math.hypot(cx - b[0], cy - b[1]))


def _circumcircle(a: Sequence[float], b: Sequence[float], c: Sequence[float]) -> Circle | None:
    ox = (min(a[0], b[0], c[0]) + max(a[0], b[0], c[0])) / 2.0
    oy = (min(a[1], b[1], c[1]) + max(a[1], b[1], c[1])) / 2.0
    ax, ay = a[0] - ox, a[1] - oy
    bx, by = b[0] - ox, b[1] - oy
    cx, cy = c[0] - ox, c[1] - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0
    if d == 0.0:
        return None
    x = ox + ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    y = oy + ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    return x, y, max(math.hypot(x - p[0], y - p[1]) for p in (a, b, c))


def _cross(p: Sequence[float], q: Sequence[float], r: Sequence[float]) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _circle_two_points(points: list[tuple[float, float]], p, q) -> Circle:
    circ = _diameter_circle(p, q)
    left: Circle | None = None
    right: Circle | None = None
    for r in points:
        if _in_circle(circ, r):
            continue
        side = _cross(p, q, r)
        c = _circumcircle(p, q, r)
        if c is None:
            continue
        if side > 0.0 and (left is None or _cross(p, q, c) > _cross(p, q, left)):
            left = c
        elif side < 0.0 and (right is None or _cross(p, q, c) < _cross(p, q, right)):
            right = c
    if left is None and right is None:
        return circ
    if left is None:
        return right
    if right is None:
        return left
    return left if left[2] <= right[2] else right


def _circle_one_point(points: list[tuple[float, float]], p) -> Circle:
    c: Circle = (p[0], p[1], 0.0)
    for i, q in enumerate(points):
        if not _in_circle(c, q):
            c = _diameter_circle(p, q) if c[2] == 0.0 else _circle_two_points(points[:i + 1], p, q)
    return c


def enclosing_circle(points: np.ndarray) -> Circle:
    """
    Smallest circle enclosing points. The points are visited in a fixed
    order, so the result is reproducible bit for bit.
    """
    pts = [(float(x), float(y)) for x, y in points]
    c: Circle | None = None
    for i, p in enumerate(pts):
        if c is None or not _in_circle(c, p):
            c = _circle_one_point(pts[:i + 1], p)
    return c if c is not None else (0.0, 0.0, 0.0)


def hull_points(points: np.ndarray) -> np.ndarray:
    if len(points) < 3:
        return points
    try:
        return points[ConvexHull(points).vertices]
    except QhullError:
        return points


def polygon_inradius(v: np.ndarray) -> float:
    """
    Radius of the largest disc inside a convex polygon: bisection on the
    inward displacement t of every edge, feasible while the shrunken
    polygon is nonempty.
    """
    step = np.roll(v, -1, axis=0) - v
    lengths = np.hypot(step[:, 0], step[:, 1])
    # outward normal of a ccw edge (dx, dy) is (dy, -dx)
    normals = np.column_stack([step[:, 1], -step[:, 0]]) / lengths[:, None]
    offsets = np.einsum("ij,ij->i", normals, v)
    start = box_polygon(Box(tuple(v.min(axis=0) - 1.0), tuple(v.max(axis=0) + 1.0)))

    def feasible(t: float) -> bool:
        poly = start
        for n, c in zip(normals, offsets):
            poly = clip_polygon(poly, (n[0], n[1]), c - t)
            if len(poly) == 0:
                return False
        return True

    lo, hi = 0.0, enclosing_circle(v)[2]
    while hi - lo > _INRADIUS_TOL:
        mid = (lo + hi) / 2.0
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def contour_length(mask: np.ndarray, grid_h: float) -> float:
    """
    Marching-squares length of the 1/2 level line of the mask sampled at
    the square centers, with crossings at edge midpoints.
    """
    padded = np.pad(np.asarray(mask, dtype=np.uint8), 1)
    case = (
        padded[:-1, :-1]
        | (padded[1:, :-1] << 1)
        | (padded[1:, 1:] << 2)
        | (padded[:-1, 1:] << 3)
    )
    diagonal = grid_h * math.sqrt(0.5)
    table = np.zeros(16)
    table[[1, 2, 4, 8, 7, 11, 13, 14]] = diagonal
    table[[3, 6, 9, 12]] = grid_h
    table[[5, 10]] = 2.0 * diagonal
    return float(table[case].sum())


def raster_inradius(mask: np.ndarray, grid_h: float) -> float:
    """Largest distance from a mask square center to the outside, less half a square."""
    depth = ndimage.distance_transform_edt(np.pad(np.asarray(mask, dtype=bool), 1))
    return max(0.0, float(depth.max()) * grid_h - grid_h / 2.0)
