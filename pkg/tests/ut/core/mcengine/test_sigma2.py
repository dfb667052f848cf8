import pytest

from tesslab.core.errors import InvalidParameterError
from tesslab.core.mcengine import sigma2
from tesslab.core.mcengine.sigma2 import estimate_sigma2
from tesslab.core.models.cell import Kernel, WeightModel
from tesslab.core.models.characteristic import Characteristic
from tesslab.core.models.point import MarkDistribution

POINT_MASS = MarkDistribution.point_mass(0.0)


@pytest.fixture
def few_draws(monkeypatch):
    monkeypatch.setattr(sigma2, "MIN_SIGMA2_DRAWS", 2)


@pytest.mark.ut
def test_zero_characteristic_has_zero_variance(few_draws):
    result = estimate_sigma2(
        WeightModel.voronoi, Characteristic.constant(0.0), POINT_MASS, 6.0, 4.0, 8, 8, 1, Kernel.exact()
    )
    assert result.value == 0.0
    assert result.stats.stderr_mean == 0.0
    assert result.n_rejected == 0


@pytest.mark.ut
def test_constant_characteristic_has_intensity_variance(few_draws):
    result = estimate_sigma2(
        WeightModel.voronoi, Characteristic.constant(1.0), POINT_MASS, 6.0, 4.0, 8, 8, 1, Kernel.exact(), intensity=2.0
    )
    # every score is 1, so the covariance term cancels
    assert result.second_moment == 2.0
    assert result.covariance_integral == 0.0
    assert result.value == 2.0


@pytest.mark.ut
def test_sigma2_is_deterministic(few_draws):
    args = (WeightModel.voronoi, Characteristic.volume(), POINT_MASS, 6.0, 3.0, 6, 6, 5, Kernel.exact())
    a = estimate_sigma2(*args).to_dict()
    b = estimate_sigma2(*args).to_dict()
    assert a == b
    assert a["r_max"] == 3.0
    assert a["median_cell_reach"] > 0


@pytest.mark.ut
def test_small_r_max_is_flagged(few_draws):
    result = estimate_sigma2(
        WeightModel.voronoi, Characteristic.volume(), POINT_MASS, 6.0, 0.01, 6, 6, 5, Kernel.exact()
    )
    assert result.r_max_warning


@pytest.mark.ut
def test_sigma2_rejections():
    with pytest.raises(InvalidParameterError):
        estimate_sigma2(WeightModel.voronoi, Characteristic.volume(), POINT_MASS, 6.0, 0.0, 200, 200, 1, Kernel.exact())
    with pytest.raises(InvalidParameterError):
        estimate_sigma2(WeightModel.voronoi, Characteristic.volume(), POINT_MASS, 6.0, 4.0, 10, 10, 1, Kernel.exact())
