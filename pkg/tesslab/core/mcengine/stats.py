import logging
import math
from collections.abc import Sequence

import numpy as np

from tesslab.core.errors import InvalidParameterError, NotStabilizedError
from tesslab.core.models.experiment import SummaryStats
from tesslab.core.pointproc.seeds import Seed, Stream, derive_rng, seed_path

BOOTSTRAP_RESAMPLES = 400
MAX_REJECTION_RATE = 1e-3


def summarize(values: Sequence[float], lam: float, seed: Seed = 0) -> SummaryStats:
    """
    Mean and sample variance of the replications, with the standard error
    of lambda * Var from a nonparametric bootstrap.
    """
    data = np.asarray(values, dtype=float)
    n = len(data)
    if n < 2:
        raise InvalidParameterError(f"Need at least 2 values to summarize, got {n}")

    mean = math.fsum(data) / n
    variance = float(np.var(data, ddof=1))
    rng = derive_rng(seed_path(seed, Stream.bootstrap))
    resampled = np.empty(BOOTSTRAP_RESAMPLES)
    for i in range(BOOTSTRAP_RESAMPLES):
        ind = rng.integers(0, n, size=n)
        resampled[i] = np.var(data[ind], ddof=1)
    return SummaryStats(
        mean=mean,
        variance=variance,
        lambda_var=lam * variance,
        stderr_mean=math.sqrt(variance / n),
        stderr_lambda_var=lam * float(resampled.std(ddof=1)),
        n=n,
    )


def combined_se(*errors: float) -> float:
    return math.sqrt(math.fsum(e * e for e in errors))


def moment(values: Sequence[float], p: float) -> float:
    """Empirical p-th absolute moment."""
    data = np.abs(np.asarray(values, dtype=float))
    return math.fsum(data ** p) / len(data) if len(data) else math.nan


def check_rejections(rejected: int, total: int, what: str) -> float:
    """
    Rate of draws rejected as uncertified. Cells are bounded almost surely,
    so a rate above MAX_REJECTION_RATE means the guard is too small.
    """
    rate = rejected / total if total else 0.0
    if rate > MAX_REJECTION_RATE:
        raise NotStabilizedError(f"{rejected} of {total} {what} were not certified (rate {rate:.3g})")
    if rejected:
        logging.getLogger("core.mcengine.stats").warning(f"Rejected {rejected} of {total} {what}")
    return rate


def histogram(values: Sequence[float], bins: int = 40) -> list[dict[str, float]]:
    """Plot-ready rows (bin_lower, bin_upper, count); finite values only."""
    data = np.asarray(values, dtype=float)
    data = data[np.isfinite(data)]
    if not len(data):
        return []
    counts, edges = np.histogram(data, bins=bins)
    return [
        {"bin_lower": float(lo), "bin_upper": float(hi), "count": int(c)}
        for lo, hi, c in zip(edges[:-1], edges[1:], counts)
    ]
