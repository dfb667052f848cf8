import math
from collections.abc import Sequence

import numpy as np
from scipy import stats

from tesslab.core.errors import InvalidParameterError
from tesslab.core.models.experiment import KSResult

MIN_KS_SAMPLE = 8
_MAX_TERMS = 100
_TERM_TOL = 1e-12


def kolmogorov_survival(x: float) -> float:
    """
    P(K > x) for the Kolmogorov distribution: the alternating series
    2 sum (-1)^(k-1) exp(-2 k^2 x^2) above 1, the theta-function form below.
    """
    if x <= 0.0:
        return 1.0
    if x < 1.0:
        s = 0.0
        for k in range(1, _MAX_TERMS + 1):
            term = math.exp(-((2 * k - 1) ** 2) * math.pi ** 2 / (8.0 * x * x))
            s += term
            if term < _TERM_TOL:
                break
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / x * s))
    s = 0.0
    for k in range(1, _MAX_TERMS + 1):
        term = math.exp(-2.0 * k * k * x * x)
        s += term if k % 2 else -term
        if term < _TERM_TOL:
            break
    return min(1.0, max(0.0, 2.0 * s))


def ks_statistic(sample: Sequence[float], ref_mean: float, ref_sd: float) -> KSResult:
    """Two-sided Kolmogorov-Smirnov test of the sample against Normal(ref_mean, ref_sd^2)."""
    if not ref_sd > 0:
        raise InvalidParameterError(f"Reference standard deviation must be > 0, got {ref_sd}")
    data = np.sort(np.asarray(sample, dtype=float))
    n = len(data)
    if n < MIN_KS_SAMPLE:
        raise InvalidParameterError(f"KS test needs at least {MIN_KS_SAMPLE} values, got {n}")

    cdf = stats.norm.cdf(data, loc=ref_mean, scale=ref_sd)
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(0, n) / n
    statistic = float(max(upper.max(), lower.max()))
    root = math.sqrt(n)
    p_value = kolmogorov_survival((root + 0.12 + 0.11 / root) * statistic)
    return KSResult(statistic=statistic, p_value=p_value, n=n)
