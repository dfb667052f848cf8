import math

import numpy as np
import pytest

from tesslab.core.estimators.characteristic import evaluate
from tesslab.core.geometry.cones import stabilization_bound
from tesslab.core.geometry.exact import cell_exact
from tesslab.core.geometry.stabilization import local_cell
from tesslab.core.geometry.tessellate import Tessellator
from tesslab.core.mcengine.experiments import run_unbiasedness_experiment
from tesslab.core.mcengine.typical import default_guard, sample_typical_cell
from tesslab.core.models.cell import Kernel, WeightModel
from tesslab.core.models.characteristic import Characteristic
from tesslab.core.models.estimate import EstimatorKind
from tesslab.core.models.experiment import ExperimentConfig
from tesslab.core.models.point import Box, MarkDistribution, MarkedPoint
from tesslab.core.pointproc.sampler import sample_guarded
from tesslab.core.pointproc.seeds import Stream, seed_path


@pytest.mark.it
def test_typical_voronoi_cell_has_unit_mean_area():
    marks = MarkDistribution.point_mass(0.0)
    guard = default_guard(marks, 1.0)
    areas = [
        evaluate(
            Characteristic.volume(),
            sample_typical_cell(WeightModel.voronoi, marks, guard, seed_path(5, Stream.typical, k), Kernel.exact()),
        )
        for k in range(400)
    ]
    # the area of a typical Poisson-Voronoi cell has variance about 0.28
    assert abs(np.mean(areas) - 1.0) < 0.15


@pytest.mark.it
@pytest.mark.parametrize(
    "model, marks",
    [
        (WeightModel.voronoi, MarkDistribution.point_mass(0.0)),
        (WeightModel.laguerre, MarkDistribution.uniform(0.0, 0.5)),
    ],
)
def test_cells_stabilize_within_cone_radius(model, marks):
    window = Box.centered(25.0)
    config = sample_guarded(window, 20.0, 1.0, marks, 21)
    tessellator = Tessellator(config, model, Kernel.exact(), marks.mu_bound)

    inside = window.contains(config.positions)
    bounds = tessellator.diameter_bounds(config.positions[inside])
    checked = 0
    for i, d in zip(np.flatnonzero(inside), bounds):
        x = config.point(int(i))
        if not math.isfinite(d):
            continue
        radius = stabilization_bound(d, tessellator.mu)
        full = tessellator.cell(x)
        assert local_cell(x, config, model, radius, Kernel.exact()).same_as(full)
        # the cell lies within the cone bound of its generator
        if full.bounded:
            assert np.all(np.linalg.norm(full.vertices - x.position, axis=1) <= d + 1e-9)
        checked += 1
    assert checked > 10


@pytest.mark.it
def test_laguerre_estimator_is_unbiased():
    cfg = ExperimentConfig(
        model=WeightModel.laguerre,
        characteristic=Characteristic.volume(),
        mark_dist=MarkDistribution.uniform(0.0, 0.5),
        lambda_values=(36.0,),
        replications=60,
        kind=EstimatorKind.full_sample,
        kernel=Kernel.exact(),
        guard=10.0,
        master_seed=17,
        guard_cap_factor=10.0,
    )
    result = run_unbiasedness_experiment(cfg)
    assert abs(result.difference) < 4.0 * result.combined_stderr + 1e-9


@pytest.mark.it
@pytest.mark.parametrize(
    "model, marks",
    [
        (WeightModel.voronoi, MarkDistribution.point_mass(0.0)),
        (WeightModel.laguerre, MarkDistribution.uniform(0.0, 0.5)),
    ],
)
def test_insertions_beyond_cone_radius_leave_cells_unchanged(model, marks):
    window = Box.centered(25.0)
    config = sample_guarded(window, 20.0, 1.0, marks, 31)
    tessellator = Tessellator(config, model, Kernel.exact(), marks.mu_bound)
    rng = np.random.default_rng(31)

    central = np.flatnonzero(np.linalg.norm(config.positions, axis=1) < 3.0)
    bounds = tessellator.diameter_bounds(config.positions[central])
    checked = 0
    for i, d in zip(central, bounds):
        if not math.isfinite(d):
            continue
        x = config.point(int(i))
        radius = stabilization_bound(d, tessellator.mu)
        reference = cell_exact(x, config, model, config.carrier)
        for _ in range(5):
            r = rng.uniform(radius * 1.001, radius + 4.0, size=7)
            angles = rng.uniform(0.0, 2.0 * math.pi, size=7)
            extra_marks = marks.sample(rng, 7)
            extra = [
                MarkedPoint((x.position[0] + a * math.cos(t), x.position[1] + a * math.sin(t)), float(m))
                for a, t, m in zip(r, angles, extra_marks)
            ]
            grown = config.with_points(extra)
            assert cell_exact(x, grown, model, grown.carrier).same_as(reference)
        checked += 1
    assert checked > 5
