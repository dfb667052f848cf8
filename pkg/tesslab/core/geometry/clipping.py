import numpy as np

from tesslab.core.models.point import Box

REL_EPS = 1e-9


def box_polygon(box: Box) -> np.ndarray:
    (x0, y0), (x1, y1) = box.lower, box.upper
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)


def _scale(vertices: np.ndarray) -> float:
    return max(1.0, float(np.abs(vertices).max())) if len(vertices) else 1.0


def simplify(vertices: np.ndarray) -> np.ndarray:
    """
    Drop repeated and collinear vertices of a convex ccw polygon. Returns an
    empty array when fewer than three vertices survive.
    """
    v = vertices
    tol = REL_EPS * _scale(v)
    changed = True
    while changed and len(v) >= 3:
        changed = False
        step = np.roll(v, -1, axis=0) - v
        keep = np.hypot(step[:, 0], step[:, 1]) > tol
        if not keep.all():
            v = v[keep]
            changed = True
            continue
        prev = v - np.roll(v, 1, axis=0)
        cross = prev[:, 0] * step[:, 1] - prev[:, 1] * step[:, 0]
        lengths = np.hypot(prev[:, 0], prev[:, 1]) * np.hypot(step[:, 0], step[:, 1])
        keep = cross > REL_EPS * lengths
        if not keep.all():
            v = v[keep]
            changed = True
    return v if len(v) >= 3 else np.empty((0, 2))


def clip_polygon(vertices: np.ndarray, normal: tuple[float, float], offset: float) -> np.ndarray:
    """
    Sutherland-Hodgman clip of a convex ccw polygon against the half-plane
    <normal, y> <= offset. Vertices within a relative epsilon of the line
    count as inside.
    """
    if len(vertices) == 0:
        return vertices

    n = np.asarray(normal, dtype=float)
    s = vertices @ n - offset
    tol = REL_EPS * max(1.0, abs(offset), float(np.hypot(*n)) * _scale(vertices))
    inside = s <= tol
    if inside.all():
        return vertices
    if not inside.any():
        return np.empty((0, 2))

    out: list[np.ndarray] = []
    for i in range(len(vertices)):
        p, q = vertices[i - 1], vertices[i]
        sp, sq = s[i - 1], s[i]
        if inside[i]:
            if not inside[i - 1]:
                out.append(p + (q - p) * (sp / (sp - sq)))
            out.append(q)
        elif inside[i - 1]:
            out.append(p + (q - p) * (sp / (sp - sq)))
    return simplify(np.asarray(out))


def touches(vertices: np.ndarray, box: Box) -> bool:
    """True if some vertex lies on the boundary of box."""
    tol = REL_EPS * _scale(vertices)
    lo, hi = np.asarray(box.lower), np.asarray(box.upper)
    return bool(np.any(np.abs(vertices - lo) <= tol) or np.any(np.abs(vertices - hi) <= tol))
