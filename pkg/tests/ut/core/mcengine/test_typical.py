import numpy as np
import pytest

from tesslab.core.errors import InvalidParameterError, NotStabilizedError
from tesslab.core.mcengine.typical import default_guard, draw_typical, sample_typical_cell
from tesslab.core.models.cell import CellShape, Kernel, WeightModel
from tesslab.core.models.point import MarkDistribution

POINT_MASS = MarkDistribution.point_mass(0.0)


@pytest.mark.ut
def test_typical_voronoi_cell_contains_origin():
    draw = draw_typical(WeightModel.voronoi, POINT_MASS, 6.0, (1, 0), Kernel.exact())
    assert not draw.rejected
    assert draw.origin.position == (0.0, 0.0)
    assert draw.cell.shape is CellShape.polygon
    lo, hi = draw.cell.vertices.min(axis=0), draw.cell.vertices.max(axis=0)
    assert (lo < 0).all() and (hi > 0).all()
    assert np.linalg.norm(draw.cell.vertices, axis=1).max() <= draw.d_bound


@pytest.mark.ut
def test_typical_draw_is_deterministic():
    marks = MarkDistribution.uniform(0.0, 0.5)
    a = draw_typical(WeightModel.laguerre, marks, 6.0, (9, 3), Kernel.exact())
    b = draw_typical(WeightModel.laguerre, marks, 6.0, (9, 3), Kernel.exact())
    assert a.origin == b.origin
    assert a.cell.same_as(b.cell)
    assert a.d_bound == b.d_bound


@pytest.mark.ut
def test_johnson_mehl_typical_cell_on_raster():
    draw = draw_typical(WeightModel.johnson_mehl, MarkDistribution.uniform(0.0, 0.3), 6.0, 4, Kernel.raster(0.05))
    assert draw.cell.shape in (CellShape.raster, CellShape.empty)


@pytest.mark.ut
def test_small_guard_doubles():
    draw = draw_typical(WeightModel.voronoi, POINT_MASS, 1.0, 2, Kernel.exact(), max_doublings=5)
    assert not draw.rejected
    assert draw.guard > 1.0


@pytest.mark.ut
def test_uncertified_draw_is_rejected():
    cell = sample_typical_cell(WeightModel.voronoi, POINT_MASS, 0.5, 2, Kernel.exact(), strict=False, max_doublings=0)
    assert cell.shape is CellShape.unbounded
    with pytest.raises(NotStabilizedError):
        sample_typical_cell(WeightModel.voronoi, POINT_MASS, 0.5, 2, Kernel.exact(), max_doublings=0)


@pytest.mark.ut
def test_typical_rejections():
    with pytest.raises(InvalidParameterError):
        draw_typical(WeightModel.voronoi, POINT_MASS, 0.0, 1, Kernel.exact())
    with pytest.raises(InvalidParameterError):
        draw_typical(WeightModel.johnson_mehl, POINT_MASS, 6.0, 1, Kernel.exact())


@pytest.mark.ut
def test_default_guard():
    assert default_guard(MarkDistribution.uniform(0.0, 0.5), 4.0) == 4.0
    assert default_guard(POINT_MASS) == 6.0
