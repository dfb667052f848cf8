import math

import pytest

from tesslab.core.errors import InvalidParameterError, NotStabilizedError
from tesslab.core.geometry import stabilization
from tesslab.core.geometry.exact import cell_exact
from tesslab.core.geometry.stabilization import local_cell, stabilization_radius_empirical
from tesslab.core.models.cell import Cell, Kernel, WeightModel
from tesslab.core.models.point import MarkedPoint
from tesslab.core.pointproc.sampler import lattice_fixture

ORIGIN = MarkedPoint((0.0, 0.0))


@pytest.mark.ut
def test_lattice_stabilizes_within_two_spacings(lattice):
    r = stabilization_radius_empirical(ORIGIN, lattice, WeightModel.voronoi, seed=4)
    assert r in (1.0, 2.0)
    local = local_cell(ORIGIN, lattice, WeightModel.voronoi, r, Kernel.exact())
    assert local.same_as(cell_exact(ORIGIN, lattice, WeightModel.voronoi, lattice.carrier))


@pytest.mark.ut
def test_stabilization_radius_is_certified(voronoi_sample):
    x = voronoi_sample.point(0)
    for i in range(len(voronoi_sample)):
        p = voronoi_sample.point(i)
        if max(abs(c) for c in p.position) < 3.0:
            x = p
            break
    r = stabilization_radius_empirical(x, voronoi_sample, WeightModel.voronoi, seed=1)
    full = cell_exact(x, voronoi_sample, WeightModel.voronoi, voronoi_sample.carrier)
    assert local_cell(x, voronoi_sample, WeightModel.voronoi, r, Kernel.exact()).same_as(full)


@pytest.mark.ut
def test_laguerre_stabilization(laguerre_sample):
    x = MarkedPoint((0.1, -0.2), 0.3)
    r = stabilization_radius_empirical(x, laguerre_sample, WeightModel.laguerre, seed=2, mark_bound=0.5)
    config = laguerre_sample.with_points([x])
    full = cell_exact(x, config, WeightModel.laguerre, config.carrier)
    assert local_cell(x, config, WeightModel.laguerre, r, Kernel.exact()).same_as(full)


@pytest.mark.ut
def test_small_carrier_cannot_stabilize(window):
    small = lattice_fixture(window, 1.0, 0.0, dilation=2.0)
    with pytest.raises(NotStabilizedError):
        stabilization_radius_empirical(ORIGIN, small, WeightModel.voronoi)


@pytest.mark.ut
@pytest.mark.parametrize("budget", [-1, 8])
def test_budget_out_of_range(lattice, budget):
    with pytest.raises(InvalidParameterError):
        stabilization_radius_empirical(ORIGIN, lattice, WeightModel.voronoi, insert_budget=budget)


@pytest.mark.ut
def test_johnson_mehl_needs_raster(lattice):
    with pytest.raises(InvalidParameterError):
        stabilization_radius_empirical(ORIGIN, lattice, WeightModel.johnson_mehl)


class UnboundedKernel:
    def cell(self, generator, positions, marks, clip, model, reach=math.inf):
        return Cell.unbounded(generator)


@pytest.mark.ut
def test_unbounded_reference_cell_cannot_stabilize(lattice, monkeypatch):
    monkeypatch.setattr(stabilization, "build_kernel", lambda kernel: UnboundedKernel())
    with pytest.raises(NotStabilizedError, match="carrier boundary"):
        stabilization_radius_empirical(ORIGIN, lattice, WeightModel.voronoi)
