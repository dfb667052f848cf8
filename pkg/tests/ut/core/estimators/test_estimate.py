import pytest

from tesslab.core.errors import GuardTooSmallError, InvalidParameterError
from tesslab.core.estimators.estimate import build_ledger, estimate, estimate_distribution_function
from tesslab.core.estimators.score import cell_of, score_xi
from tesslab.core.geometry.exact import cell_exact
from tesslab.core.models.cell import CellShape, Kernel, WeightModel
from tesslab.core.models.characteristic import Characteristic
from tesslab.core.models.estimate import EstimatorKind, Exclusion
from tesslab.core.models.point import Box, MarkedConfiguration, MarkedPoint
from tesslab.core.pointproc.sampler import lattice_fixture, translate

VOLUME = Characteristic.volume()


@pytest.mark.ut
@pytest.mark.parametrize("kind", [
    EstimatorKind.full_sample,
    EstimatorKind.window_sample,
    EstimatorKind.truncated_full_sample,
    EstimatorKind.truncated_window_sample,
])
def test_lattice_minus_sampling_is_exact(window, lattice, kind):
    result = estimate(lattice, window, WeightModel.voronoi, VOLUME, kind, Kernel.exact())
    assert result.value == pytest.approx(1.0, abs=1e-12)
    assert result.n_included == 81
    assert all(c.erosion_volume == pytest.approx(81.0) for c in result.contributions if c.included)


@pytest.mark.ut
def test_lattice_naive_counts_boundary_cells(window, lattice):
    result = estimate(lattice, window, WeightModel.voronoi, VOLUME, EstimatorKind.naive, Kernel.exact())
    # 11 x 11 generators lie in the closed window
    assert result.value == pytest.approx(1.21, abs=1e-12)


@pytest.mark.ut
def test_lattice_raster_estimate(window, lattice):
    result = estimate(lattice, window, WeightModel.voronoi, VOLUME, EstimatorKind.full_sample, Kernel.raster(0.25))
    assert result.value == pytest.approx(1.0, abs=1e-12)


@pytest.mark.ut
def test_value_equals_ledger_sum(voronoi_sample):
    window = Box.centered(25.0)
    result = estimate(voronoi_sample, window, WeightModel.voronoi, VOLUME, EstimatorKind.full_sample, Kernel.exact())
    assert result.value == result.recompute()
    assert result.contributions == tuple(sorted(result.contributions, key=lambda c: c.generator))
    assert result.n_included > 0


@pytest.mark.ut
def test_truncation_excludes_small_erosions(voronoi_sample):
    window = Box.centered(25.0)
    full = estimate(voronoi_sample, window, WeightModel.voronoi, VOLUME, EstimatorKind.full_sample, Kernel.exact())
    truncated = estimate(
        voronoi_sample, window, WeightModel.voronoi, VOLUME, EstimatorKind.truncated_full_sample, Kernel.exact()
    )
    assert truncated.n_included + truncated.n_excluded_threshold == full.n_included
    for c in truncated.contributions:
        if c.reason is Exclusion.below_threshold:
            assert c.erosion_volume < 12.5


@pytest.mark.ut
def test_full_sample_scope_reaches_outside(voronoi_sample):
    window = Box.centered(25.0)
    ledger = build_ledger(voronoi_sample, window, WeightModel.voronoi, EstimatorKind.full_sample, Kernel.exact())
    outside = [d for d in ledger.decisions if not window.contains(d.generator.position).all()]
    assert ledger.n_out_of_scope > 0
    assert len(ledger.decisions) + ledger.n_out_of_scope == len(voronoi_sample)
    assert all(not d.included for d in outside)


@pytest.mark.ut
def test_uncertified_cell_raises(window):
    tight = lattice_fixture(window, 1.0, 0.0, dilation=2.0)
    with pytest.raises(GuardTooSmallError) as ex:
        estimate(tight, window, WeightModel.voronoi, VOLUME, EstimatorKind.full_sample, Kernel.exact())
    assert ex.value.radius > 2.0


@pytest.mark.ut
def test_empty_configuration_estimates_zero(window):
    result = estimate(
        MarkedConfiguration.empty(window.dilate(1.0)), window, WeightModel.voronoi, VOLUME,
        EstimatorKind.full_sample, Kernel.exact(),
    )
    assert result.value == 0.0


@pytest.mark.ut
def test_carrier_must_contain_window(lattice):
    with pytest.raises(InvalidParameterError):
        estimate(lattice, Box.centered(10_000.0), WeightModel.voronoi, VOLUME, EstimatorKind.naive, Kernel.exact())


@pytest.mark.ut
def test_distribution_function_is_monotone(voronoi_sample):
    window = Box.centered(25.0)
    grid = [0.25, 0.5, 1.0, 1.5, 2.0, 4.0]
    values = estimate_distribution_function(
        voronoi_sample, window, WeightModel.voronoi, grid, EstimatorKind.full_sample, Kernel.exact()
    )
    assert [t for t, _ in values] == grid
    assert all(a <= b for (_, a), (_, b) in zip(values, values[1:]))

    single = estimate(
        voronoi_sample, window, WeightModel.voronoi, Characteristic.indicator_volume_leq(1.0),
        EstimatorKind.full_sample, Kernel.exact(),
    )
    assert values[2][1] == pytest.approx(single.value)


@pytest.mark.ut
def test_distribution_function_rejections(voronoi_sample):
    window = Box.centered(25.0)
    with pytest.raises(InvalidParameterError):
        estimate_distribution_function(
            voronoi_sample, window, WeightModel.voronoi, [0.0], EstimatorKind.full_sample, Kernel.exact()
        )
    with pytest.raises(InvalidParameterError):
        estimate_distribution_function(
            voronoi_sample, window, WeightModel.voronoi, [1.0], EstimatorKind.full_sample, Kernel.exact(),
            base=Characteristic.indicator_volume_leq(1.0),
        )


@pytest.mark.ut
def test_score_inserts_missing_point(lattice):
    x = MarkedPoint((0.5, 0.25))
    cell = cell_of(x, lattice, WeightModel.voronoi, Kernel.exact())
    assert cell.shape is CellShape.polygon
    assert score_xi(VOLUME, MarkedPoint((0.0, 0.0)), lattice, WeightModel.voronoi, Kernel.exact()) == pytest.approx(1.0)


SHIFT = (3.5, -1.25)


@pytest.mark.ut
@pytest.mark.parametrize("kind", [EstimatorKind.full_sample, EstimatorKind.window_sample, EstimatorKind.naive])
@pytest.mark.parametrize("model, sample", [
    (WeightModel.voronoi, "voronoi_sample"),
    (WeightModel.laguerre, "laguerre_sample"),
])
def test_estimate_is_translation_invariant(request, model, sample, kind):
    config = request.getfixturevalue(sample)
    window = Box.centered(25.0)
    a = estimate(config, window, model, VOLUME, kind, Kernel.exact())
    b = estimate(translate(config, SHIFT), window.translate(SHIFT), model, VOLUME, kind, Kernel.exact())
    assert b.value == pytest.approx(a.value, rel=1e-9)
    assert b.n_included == a.n_included


@pytest.mark.ut
def test_cells_and_scores_move_with_the_configuration(laguerre_sample):
    moved = translate(laguerre_sample, SHIFT)
    for i in range(0, len(laguerre_sample), 97):
        x = laguerre_sample.point(i)
        cell = cell_exact(x, laguerre_sample, WeightModel.laguerre, laguerre_sample.carrier)
        shifted = cell_exact(x.translate(SHIFT), moved, WeightModel.laguerre, moved.carrier)
        assert shifted.same_as(cell.translate(SHIFT))

    x = MarkedPoint((0.3, -0.2), 0.25)
    a = score_xi(VOLUME, x, laguerre_sample, WeightModel.laguerre, Kernel.exact(), mark_bound=0.5)
    b = score_xi(VOLUME, x.translate(SHIFT), moved, WeightModel.laguerre, Kernel.exact(), mark_bound=0.5)
    assert b == pytest.approx(a, rel=1e-9)


@pytest.mark.ut
def test_voronoi_window_and_full_sample_agree(voronoi_sample):
    # a Voronoi generator lies in its own cell, so a cell inside W has its generator in W
    window = Box.centered(25.0)
    full = estimate(voronoi_sample, window, WeightModel.voronoi, VOLUME, EstimatorKind.full_sample, Kernel.exact())
    inner = estimate(voronoi_sample, window, WeightModel.voronoi, VOLUME, EstimatorKind.window_sample, Kernel.exact())
    assert inner.value == pytest.approx(full.value, rel=1e-12)
    assert inner.n_included == full.n_included
