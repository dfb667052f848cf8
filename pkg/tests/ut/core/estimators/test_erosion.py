import numpy as np
import pytest

from tesslab.core.estimators.erosion import contained, erosion_volume
from tesslab.core.geometry.exact import cell_exact
from tesslab.core.models.cell import BoundingBox, CellShape, WeightModel
from tesslab.core.models.point import Box

WINDOW = Box((0.0, 0.0), (10.0, 10.0))


@pytest.mark.ut
def test_erosion_shrinks_window_by_extents():
    assert erosion_volume(WINDOW, BoundingBox((1.0, 1.0), (3.0, 4.0))) == 56.0


@pytest.mark.ut
def test_erosion_of_large_cell_is_zero():
    assert erosion_volume(WINDOW, BoundingBox((0.0, 0.0), (12.0, 1.0))) == 0.0


@pytest.mark.ut
def test_erosion_ignores_position():
    a = erosion_volume(WINDOW, BoundingBox((1.0, 1.0), (3.0, 4.0)))
    b = erosion_volume(WINDOW, BoundingBox((-50.0, 7.0), (-48.0, 10.0)))
    assert a == b


@pytest.mark.ut
def test_contained():
    inside = BoundingBox((1.0, 1.0), (3.0, 4.0))
    assert contained(WINDOW, inside)
    assert not contained(WINDOW, inside, shell=1.5)
    assert not contained(WINDOW, BoundingBox((-1.0, 1.0), (3.0, 4.0)))


def _brute_force_erosion(window: Box, vertices: np.ndarray, step: float) -> float:
    """Grid count of the shifts x with x + C inside the window, C the convex hull of vertices."""
    lo = np.asarray(window.lower) - vertices.max(axis=0) - step
    hi = np.asarray(window.upper) - vertices.min(axis=0) + step
    xs = np.arange(lo[0], hi[0], step) + step / 2
    ys = np.arange(lo[1], hi[1], step) + step / 2
    ok = np.ones((len(xs), len(ys)), dtype=bool)
    for vx, vy in vertices:
        ok &= ((xs + vx >= window.lower[0]) & (xs + vx <= window.upper[0]))[:, None]
        ok &= ((ys + vy >= window.lower[1]) & (ys + vy <= window.upper[1]))[None, :]
    return float(ok.sum()) * step * step


@pytest.mark.ut
def test_erosion_matches_brute_force(voronoi_sample):
    rng = np.random.default_rng(7)
    step = 0.02
    checked = 0
    for i in range(0, len(voronoi_sample), 53):
        cell = cell_exact(voronoi_sample.point(i), voronoi_sample, WeightModel.voronoi, voronoi_sample.carrier)
        if cell.shape is not CellShape.polygon:
            continue
        lower = rng.uniform(-5.0, 5.0, size=2)
        upper = lower + rng.uniform(0.5, 6.0, size=2)
        window = Box((float(lower[0]), float(lower[1])), (float(upper[0]), float(upper[1])))
        expected = _brute_force_erosion(window, cell.vertices, step)
        # one grid shell around the eroded rectangle
        tol = 2.0 * step * sum(window.sides) + 4.0 * step * step
        assert erosion_volume(window, cell.bounding_box()) == pytest.approx(expected, abs=tol)
        checked += 1
    assert checked > 10
