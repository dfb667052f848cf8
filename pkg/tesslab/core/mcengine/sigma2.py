import logging
import math
from dataclasses import dataclass
from functools import partial
from typing import Any

import numpy as np

from tesslab.core.errors import InvalidParameterError
from tesslab.core.estimators.characteristic import evaluate
from tesslab.core.geometry.tessellate import Tessellator
from tesslab.core.mcengine.pool import ReplicationPool
from tesslab.core.mcengine.stats import check_rejections
from tesslab.core.mcengine.tails import pilot_quantile
from tesslab.core.mcengine.typical import draw_typical, origin_box
from tesslab.core.models.cell import Cell, CellShape, Kernel, WeightModel
from tesslab.core.models.characteristic import Characteristic
from tesslab.core.models.experiment import SummaryStats
from tesslab.core.models.point import MarkDistribution, MarkedPoint
from tesslab.core.pointproc.sampler import extend_carrier, sample_poisson
from tesslab.core.pointproc.seeds import Seed, Stream, derive_rng, seed_path

logger = logging.getLogger("core.mcengine.sigma2")

MIN_SIGMA2_DRAWS = 100
R_MAX_QUANTILE = 0.999
_MAX_DOUBLINGS = 3


@dataclass(frozen=True, slots=True)
class Sigma2Estimate:
    """
    sigma^2 = gamma E xi(0, eta)^2
            + gamma^2 int_{B_rmax} E xi(0, eta + x) xi(x, eta + 0) - E xi(0, eta) E xi(x, eta) dx
    """
    stats: SummaryStats
    """mean and lambda_var hold the estimate, the stderr fields its standard error."""

    second_moment: float
    covariance_integral: float
    stderr_second_moment: float
    stderr_covariance: float
    r_max: float
    n_singles: int
    n_pairs: int
    n_rejected: int
    median_cell_reach: float
    """Median distance from the origin to the farthest point of its cell."""

    @property
    def value(self) -> float:
        return self.stats.mean

    @property
    def r_max_warning(self) -> bool:
        return self.r_max < self.median_cell_reach

    def to_dict(self) -> dict[str, Any]:
        return {
            "sigma2": self.value,
            "stderr": self.stats.stderr_mean,
            "second_moment": self.second_moment,
            "covariance_integral": self.covariance_integral,
            "stderr_second_moment": self.stderr_second_moment,
            "stderr_covariance": self.stderr_covariance,
            "r_max": self.r_max,
            "n_singles": self.n_singles,
            "n_pairs": self.n_pairs,
            "n_rejected": self.n_rejected,
            "median_cell_reach": self.median_cell_reach,
            "r_max_warning": self.r_max_warning,
            "truncation": "covariance of scores at distance > r_max neglected; it decays exponentially",
        }


def _reach(cell: Cell) -> float:
    match cell.shape:
        case CellShape.polygon:
            points = cell.vertices
        case CellShape.raster:
            points = cell.square_centers()
        case _:
            return 0.0
    center = np.asarray(cell.generator.position)
    return float(np.linalg.norm(points - center, axis=1).max())


def _single(
    model: WeightModel,
    h: Characteristic,
    mark_dist: MarkDistribution,
    guard: float,
    kernel: Kernel,
    intensity: float,
    seed: Seed,
) -> tuple[float, float]:
    draw = draw_typical(model, mark_dist, guard, seed, kernel, intensity)
    if draw.rejected:
        return math.nan, math.nan
    return evaluate(h, draw.cell), _reach(draw.cell)


def _mean_pair(
    model: WeightModel,
    h: Characteristic,
    mark_dist: MarkDistribution,
    guard: float,
    kernel: Kernel,
    intensity: float,
    seed: Seed,
) -> float:
    a, _ = _single(model, h, mark_dist, guard, kernel, intensity, seed_path(seed, 0))
    b, _ = _single(model, h, mark_dist, guard, kernel, intensity, seed_path(seed, 1))
    return a * b


def _pair(
    model: WeightModel,
    h: Characteristic,
    mark_dist: MarkDistribution,
    guard: float,
    r_max: float,
    kernel: Kernel,
    intensity: float,
    seed: Seed,
) -> float:
    """xi(0, eta + x) xi(x, eta + 0) on one Poisson sample, x uniform on B_rmax."""
    rng = derive_rng(seed_path(seed, Stream.sigma_pair))
    radius = r_max * math.sqrt(rng.random())
    angle = 2.0 * math.pi * rng.random()
    m0, mx = mark_dist.sample(rng, 2)
    origin = MarkedPoint((0.0, 0.0), float(m0))
    other = MarkedPoint((radius * math.cos(angle), radius * math.sin(angle)), float(mx))
    points = np.array([origin.position, other.position])

    half = r_max + guard
    config = sample_poisson(origin_box(half), intensity, mark_dist, seed_path(seed, Stream.sample))
    config = config.with_points([origin, other])
    for attempt in range(_MAX_DOUBLINGS + 1):
        tessellator = Tessellator(config, model, kernel, mark_bound=mark_dist.mu_bound)
        bounds = tessellator.diameter_bounds(points)
        if all(tessellator.certified(p, d) for p, d in zip(points, bounds)):
            c0 = tessellator.cell(origin, float(bounds[0]))
            cx = tessellator.cell(other, float(bounds[1]))
            return evaluate(h, c0) * evaluate(h, cx)
        if attempt == _MAX_DOUBLINGS:
            break
        half *= 2.0
        config = extend_carrier(config, origin_box(half), intensity, mark_dist, seed_path(seed, Stream.sample, attempt + 1))
    return math.nan


def default_r_max(
    model: WeightModel,
    mark_dist: MarkDistribution,
    seed: Seed,
    intensity: float = 1.0,
    n: int = 10_000,
    pool: ReplicationPool | None = None,
) -> float:
    """Twice the 0.999 quantile of the stabilization radius 2 D + mu."""
    q = pilot_quantile(model, mark_dist, n, R_MAX_QUANTILE, seed_path(seed, Stream.pilot), intensity, pool)
    return 2.0 * (2.0 * q + model.effective_mu(mark_dist.mu_bound))


def estimate_sigma2(
    model: WeightModel,
    h: Characteristic,
    mark_dist: MarkDistribution,
    guard: float,
    r_max: float,
    n_singles: int,
    n_pairs: int,
    seed: Seed,
    kernel: Kernel,
    intensity: float = 1.0,
    pool: ReplicationPool | None = None,
) -> Sigma2Estimate:
    """
    Monte Carlo estimate of the limiting variance. The pair term inserts
    both points into one sample; the product of means comes from
    independent single insertions.
    """
    if not r_max > 0:
        raise InvalidParameterError(f"r_max must be > 0, got {r_max}")
    if min(n_singles, n_pairs) < MIN_SIGMA2_DRAWS:
        raise InvalidParameterError(f"sigma2 needs at least {MIN_SIGMA2_DRAWS} singles and pairs")
    kernel.check(model)
    pool = pool or ReplicationPool()

    singles = pool.map(
        partial(_single, model, h, mark_dist, guard, kernel, intensity),
        [seed_path(seed, Stream.sigma_single, i) for i in range(n_singles)],
    )
    pairs = pool.map(
        partial(_pair, model, h, mark_dist, guard, r_max, kernel, intensity),
        [seed_path(seed, Stream.sigma_pair, j) for j in range(n_pairs)],
    )
    means = pool.map(
        partial(_mean_pair, model, h, mark_dist, guard, kernel, intensity),
        [seed_path(seed, Stream.sigma_mean, j) for j in range(n_pairs)],
    )

    scores = np.array([s for s, _ in singles])
    reaches = np.array([r for _, r in singles])
    diffs = np.array(pairs) - np.array(means)
    ok_singles, ok_pairs = ~np.isnan(scores), ~np.isnan(diffs)
    rejected = int((~ok_singles).sum() + (~ok_pairs).sum())
    check_rejections(rejected, n_singles + n_pairs, "sigma2 draws")
    scores, diffs = scores[ok_singles], diffs[ok_pairs]

    ball = math.pi * r_max * r_max
    squares = scores ** 2
    second = intensity * math.fsum(squares) / len(squares)
    covariance = intensity ** 2 * ball * math.fsum(diffs) / len(diffs)
    se_second = intensity * float(np.std(squares, ddof=1)) / math.sqrt(len(squares))
    se_covariance = intensity ** 2 * ball * float(np.std(diffs, ddof=1)) / math.sqrt(len(diffs))
    se = math.hypot(se_second, se_covariance)
    sigma2 = second + covariance

    median_reach = float(np.median(reaches[ok_singles]))
    if r_max < median_reach:
        logger.warning(f"r_max={r_max:.4g} is below the median cell reach {median_reach:.4g}")
    logger.info(f"sigma2={sigma2:.6g} +- {se:.3g} (r_max={r_max:.4g})")
    return Sigma2Estimate(
        stats=SummaryStats(sigma2, se * se, sigma2, se, se, n_singles + n_pairs),
        second_moment=second,
        covariance_integral=covariance,
        stderr_second_moment=se_second,
        stderr_covariance=se_covariance,
        r_max=r_max,
        n_singles=n_singles,
        n_pairs=n_pairs,
        n_rejected=rejected,
        median_cell_reach=median_reach,
    )
