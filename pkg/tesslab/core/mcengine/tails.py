import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import partial
from typing import Any

import numpy as np
from scipy import stats

from tesslab.core.errors import DegenerateSampleError, InvalidParameterError
from tesslab.core.geometry.cones import diameter_bound, stabilization_bound
from tesslab.core.mcengine.pool import ReplicationPool
from tesslab.core.mcengine.stats import check_rejections
from tesslab.core.mcengine.typical import default_guard, draw_typical, origin_box
from tesslab.core.models.cell import CellShape, Kernel, WeightModel
from tesslab.core.models.experiment import TailFit
from tesslab.core.models.point import MarkDistribution, MarkedPoint
from tesslab.core.pointproc.sampler import sample_poisson
from tesslab.core.pointproc.seeds import Seed, Stream, seed_path

logger = logging.getLogger("core.mcengine.tails")

MIN_TAIL_SAMPLES = 10_000
QUANTILE_RANGE = (0.9, 0.999)
FIT_POINTS = 25
_PILOT_DOUBLINGS = 6


def fit_tail(samples: Sequence[float], dim: int = 2, quantiles: tuple[float, float] = QUANTILE_RANGE) -> TailFit:
    """
    Least-squares fit of log P(X >= t) = a - rate * t^dim at thresholds
    spread over the quantile range, and of log(-log P(X >= t)) against log t
    for the free exponent.
    """
    data = np.asarray(samples, dtype=float)
    data = data[np.isfinite(data)]
    if len(data) < 2:
        raise DegenerateSampleError("Tail fit needs finite samples")
    thresholds = np.unique(np.quantile(data, np.linspace(*quantiles, FIT_POINTS)))
    survival = np.array([np.mean(data >= t) for t in thresholds])
    usable = (thresholds > 0) & (survival > 0) & (survival < 1)
    thresholds, survival = thresholds[usable], survival[usable]
    if len(thresholds) < 3:
        raise DegenerateSampleError(f"Only {len(thresholds)} distinct tail thresholds")

    log_survival = np.log(survival)
    fixed = stats.linregress(thresholds ** dim, log_survival)
    free = stats.linregress(np.log(thresholds), np.log(-log_survival))
    return TailFit(
        thresholds=tuple(map(float, thresholds)),
        log_survival=tuple(map(float, log_survival)),
        fitted_rate=float(-fixed.slope),
        fitted_exponent_alpha=float(free.slope),
        r_squared=float(fixed.rvalue ** 2),
        intercept=float(fixed.intercept),
        r_squared_free=float(free.rvalue ** 2),
    )


@dataclass(frozen=True, slots=True)
class TailExperiment:
    fit: TailFit
    """Tail of the cone bound D."""

    stabilization_fit: TailFit
    """Tail of the stabilization radius R = 2 D + mu."""

    d_bound: np.ndarray
    circumradius: np.ndarray
    """Largest distance from the origin to its cell; NaN for rejected draws."""

    mu: float
    n_rejected: int

    @property
    def containment_holds(self) -> bool:
        ok = np.isnan(self.circumradius) | (self.circumradius <= self.d_bound * (1 + 1e-12))
        return bool(ok.all())

    def rows(self) -> list[dict[str, Any]]:
        return [
            {"sample": i, "D_bound": float(d), "circumradius": float(r)}
            for i, (d, r) in enumerate(zip(self.d_bound, self.circumradius))
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": len(self.d_bound),
            "mu": self.mu,
            "n_rejected": self.n_rejected,
            "containment_holds": self.containment_holds,
            "diameter_fit": self.fit.to_dict(),
            "stabilization_fit": self.stabilization_fit.to_dict(),
        }


def _tail_draw(
    model: WeightModel,
    mark_dist: MarkDistribution,
    guard: float,
    kernel: Kernel,
    intensity: float,
    seed: Seed,
) -> tuple[float, float]:
    draw = draw_typical(model, mark_dist, guard, seed, kernel, intensity)
    match draw.cell.shape:
        case CellShape.unbounded:
            return draw.d_bound, math.nan
        case CellShape.empty:
            return draw.d_bound, 0.0
        case CellShape.polygon:
            points = draw.cell.vertices
        case _:
            points = draw.cell.square_centers()
    return draw.d_bound, float(np.hypot(points[:, 0], points[:, 1]).max())


def diameter_tail_experiment(
    model: WeightModel,
    mark_dist: MarkDistribution,
    n: int,
    seed: Seed,
    kernel: Kernel | None = None,
    intensity: float = 1.0,
    guard: float | None = None,
    pool: ReplicationPool | None = None,
    quantiles: tuple[float, float] = QUANTILE_RANGE,
) -> TailExperiment:
    """
    Cone bounds and realized circumradii of n typical cells, with the fits
    of the diameter and stabilization tails.
    """
    if n < MIN_TAIL_SAMPLES:
        raise InvalidParameterError(f"Tail experiments need n >= {MIN_TAIL_SAMPLES}, got {n}")
    kernel = kernel or Kernel.exact()
    kernel.check(model)
    guard = guard or default_guard(mark_dist, intensity)
    pool = pool or ReplicationPool()

    draw = partial(_tail_draw, model, mark_dist, guard, kernel, intensity)
    results = pool.map(draw, [seed_path(seed, Stream.tails, i) for i in range(n)])
    d_bound = np.array([d for d, _ in results])
    circumradius = np.array([r for _, r in results])
    rejected = int(np.isnan(circumradius).sum())
    check_rejections(rejected, n, "typical cells")

    mu = model.effective_mu(mark_dist.mu_bound)
    logger.info(f"Tail experiment: {n} cells, {rejected} rejected, max D {np.nanmax(d_bound):.4g}")
    return TailExperiment(
        fit=fit_tail(d_bound, quantiles=quantiles),
        stabilization_fit=fit_tail(stabilization_bound(d_bound, mu), quantiles=quantiles),
        d_bound=d_bound,
        circumradius=circumradius,
        mu=mu,
        n_rejected=rejected,
    )


def _pilot_bound(model: WeightModel, mark_dist: MarkDistribution, intensity: float, seed: Seed) -> float:
    mu = model.effective_mu(mark_dist.mu_bound)
    origin = MarkedPoint((0.0, 0.0), 0.0)
    radius = default_guard(mark_dist, intensity)
    for k in range(_PILOT_DOUBLINGS + 1):
        config = sample_poisson(origin_box(radius), intensity, mark_dist, seed_path(seed, k))
        d = diameter_bound(origin, config, mu)
        if math.isfinite(d):
            return d
        radius *= 2.0
    return math.inf


def pilot_quantile(
    model: WeightModel,
    mark_dist: MarkDistribution,
    n: int,
    q: float,
    seed: Seed,
    intensity: float = 1.0,
    pool: ReplicationPool | None = None,
) -> float:
    """
    Empirical q-quantile of the cone bound D of the origin over n Poisson
    samples. Bounds read from a finite box only overestimate D.
    """
    pool = pool or ReplicationPool()
    bound = partial(_pilot_bound, model, mark_dist, intensity)
    samples = np.array(pool.map(bound, [seed_path(seed, i) for i in range(n)]))
    return float(np.quantile(samples, q))
