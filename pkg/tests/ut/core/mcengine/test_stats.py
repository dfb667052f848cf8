import math

import numpy as np
import pytest
from scipy import stats

from tesslab.core.errors import InvalidParameterError, NotStabilizedError
from tesslab.core.mcengine.ks import kolmogorov_survival, ks_statistic
from tesslab.core.mcengine.stats import check_rejections, combined_se, histogram, moment, summarize


@pytest.mark.ut
def test_summarize():
    s = summarize([1.0, 2.0, 3.0, 4.0], 10.0, seed=3)
    assert s.mean == 2.5
    assert s.variance == pytest.approx(5.0 / 3.0)
    assert s.lambda_var == pytest.approx(50.0 / 3.0)
    assert s.stderr_mean == pytest.approx(math.sqrt(5.0 / 12.0))
    assert s.stderr_lambda_var > 0
    assert s.n == 4


@pytest.mark.ut
def test_summarize_is_seeded():
    values = np.random.default_rng(0).normal(size=50)
    assert summarize(values, 4.0, seed=1) == summarize(values, 4.0, seed=1)


@pytest.mark.ut
def test_summarize_needs_two_values():
    with pytest.raises(InvalidParameterError):
        summarize([1.0], 1.0)


@pytest.mark.ut
def test_moment_and_combined_se():
    assert moment([-1.0, 2.0], 2.0) == 2.5
    assert math.isnan(moment([], 2.0))
    assert combined_se(3.0, 4.0) == 5.0


@pytest.mark.ut
def test_rejection_rate():
    assert check_rejections(0, 100, "cells") == 0.0
    assert check_rejections(1, 10_000, "cells") == 1e-4
    with pytest.raises(NotStabilizedError):
        check_rejections(2, 100, "cells")


@pytest.mark.ut
def test_histogram_skips_non_finite():
    rows = histogram([0.0, 1.0, 1.0, math.nan, math.inf], bins=2)
    assert [r["count"] for r in rows] == [1, 2]
    assert rows[0]["bin_lower"] == 0.0
    assert rows[-1]["bin_upper"] == 1.0
    assert histogram([math.nan]) == []


@pytest.mark.ut
@pytest.mark.parametrize("x", [0.3, 0.6, 0.9, 1.0, 1.3, 2.0])
def test_kolmogorov_survival_matches_scipy(x):
    assert kolmogorov_survival(x) == pytest.approx(stats.kstwobign.sf(x), abs=1e-10)


@pytest.mark.ut
def test_ks_accepts_normal_sample():
    sample = np.random.default_rng(2).normal(size=2000)
    result = ks_statistic(sample, 0.0, 1.0)
    assert result.n == 2000
    assert result.p_value > 0.001


@pytest.mark.ut
def test_ks_rejects_shifted_sample():
    sample = np.random.default_rng(2).normal(loc=0.5, size=2000)
    assert ks_statistic(sample, 0.0, 1.0).p_value < 1e-6


@pytest.mark.ut
def test_ks_of_normal_quantiles_is_half_a_step():
    n = 200
    quantiles = stats.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
    result = ks_statistic(quantiles, 0.0, 1.0)
    assert result.statistic == pytest.approx(0.5 / n, abs=1e-12)
    assert result.p_value > 0.999


@pytest.mark.ut
def test_ks_p_values_are_uniform_under_the_null():
    rng = np.random.default_rng(11)
    p_values = np.array([ks_statistic(rng.normal(size=100), 0.0, 1.0).p_value for _ in range(300)])
    assert 0.4 < p_values.mean() < 0.6
    assert (p_values < 0.05).mean() < 0.1
    assert stats.kstest(p_values, "uniform").pvalue > 0.001


@pytest.mark.ut
def test_ks_rejections():
    with pytest.raises(InvalidParameterError):
        ks_statistic([0.0] * 20, 0.0, 0.0)
    with pytest.raises(InvalidParameterError):
        ks_statistic([0.0, 1.0], 0.0, 1.0)
