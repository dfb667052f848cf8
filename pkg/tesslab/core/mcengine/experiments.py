"""
Monte Carlo experiments over replicated estimates.

Replication r at the i-th window volume draws its configuration from the
seed path (master_seed, sample, i, r) and its typical cell from
(master_seed, typical, i, r); every experiment is a pure function of its
config and the resolved guard.
"""
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import partial
from typing import Any

import numpy as np
from scipy.stats import norm

from tesslab.core.errors import DegenerateSampleError, GuardTooSmallError, InvalidParameterError, NotStabilizedError
from tesslab.core.estimators.characteristic import evaluate
from tesslab.core.estimators.erosion import erosion_volume
from tesslab.core.estimators.estimate import estimate
from tesslab.core.mcengine.guard import resolve_guard
from tesslab.core.mcengine.ks import ks_statistic
from tesslab.core.mcengine.pool import ReplicationPool
from tesslab.core.mcengine.stats import check_rejections, moment, summarize
from tesslab.core.mcengine.typical import draw_typical
from tesslab.core.models.estimate import EstimateResult, EstimatorKind
from tesslab.core.models.experiment import ExperimentConfig, KSResult, ReplicationRecord, SummaryStats
from tesslab.core.models.point import Box, MarkedConfiguration
from tesslab.core.pointproc.sampler import extend_carrier, sample_guarded
from tesslab.core.pointproc.seeds import Stream, seed_path

logger = logging.getLogger("core.mcengine.experiments")

MIN_CLT_REPLICATIONS = 500

VARIANCE_COLUMNS = ("lambda", "mean", "variance", "lambda_var", "stderr_mean", "stderr_lambda_var", "n")
CONSISTENCY_COLUMNS = (
    "lambda",
    "naive_mean",
    "naive_stderr_mean",
    "truncated_mean",
    "truncated_stderr_mean",
    "difference",
    "stderr_difference",
)


def _guard(cfg: ExperimentConfig, guard: float | None, pool: ReplicationPool | None) -> float:
    return guard if guard is not None else resolve_guard(cfg, pool=pool).guard


def _index(cfg: ExperimentConfig, lam: float) -> int:
    for i, value in enumerate(cfg.lambda_values):
        if value == lam:
            return i
    raise InvalidParameterError(f"lambda {lam} is not one of {cfg.lambda_values}")


def replication_sample(cfg: ExperimentConfig, lam_index: int, guard: float, replication: int) -> MarkedConfiguration:
    window = Box.centered(cfg.lambda_values[lam_index])
    seed = seed_path(cfg.master_seed, Stream.sample, lam_index, replication)
    return sample_guarded(window, guard, cfg.intensity, cfg.mark_dist, seed)


def estimate_with_guard(
    cfg: ExperimentConfig,
    lam_index: int,
    guard: float,
    kind: EstimatorKind,
    replication: int,
) -> tuple[EstimateResult, MarkedConfiguration]:
    """
    One estimate on a fresh guarded Poisson sample. An uncertified cell
    doubles the guard by sampling the added frame only, up to
    max_guard_doublings times and never past the guard cap. Returns the
    estimate and the configuration it was computed on.
    """
    lam = cfg.lambda_values[lam_index]
    window = Box.centered(lam)
    seed = seed_path(cfg.master_seed, Stream.sample, lam_index, replication)
    config = replication_sample(cfg, lam_index, guard, replication)
    cap = max(cfg.guard_cap(lam), guard)

    g = guard
    for attempt in range(cfg.max_guard_doublings + 1):
        try:
            result = estimate(
                config, window, cfg.model, cfg.characteristic, kind, cfg.kernel, mark_bound=cfg.mark_dist.mu_bound
            )
            return result, config
        except GuardTooSmallError as exc:
            grown = 2.0 * g if g > 0 else exc.radius
            if attempt == cfg.max_guard_doublings or grown > cap:
                raise NotStabilizedError(
                    f"Replication {replication} at lambda={lam} needs a guard beyond {g:.6g} (cap {cap:.6g})"
                ) from exc
            logger.info(f"Replication {replication} at lambda={lam}: guard {g:.6g} -> {grown:.6g}")
            g = grown
            config = extend_carrier(config, window.dilate(g), cfg.intensity, cfg.mark_dist, seed_path(seed, attempt))
    raise AssertionError("unreachable")


def estimate_replication(
    cfg: ExperimentConfig,
    lam_index: int,
    guard: float,
    kind: EstimatorKind,
    replication: int,
) -> ReplicationRecord:
    result, config = estimate_with_guard(cfg, lam_index, guard, kind, replication)
    return replication_record(result, config, replication)


def replication_record(result: EstimateResult, config: MarkedConfiguration, replication: int) -> ReplicationRecord:
    window = Box.centered(result.lam)
    return ReplicationRecord(
        replication=replication,
        lam=result.lam,
        kind=result.kind.value,
        value=result.value,
        n_cells_included=result.n_included,
        n_cells_excluded_threshold=result.n_excluded_threshold,
        n_unbounded=result.n_unbounded,
        guard=config.carrier.upper[0] - window.upper[0],
    )


def replicate_estimates(
    cfg: ExperimentConfig,
    lam: float,
    guard: float,
    kind: EstimatorKind | None = None,
    pool: ReplicationPool | None = None,
) -> list[ReplicationRecord]:
    pool = pool or ReplicationPool()
    run = partial(estimate_replication, cfg, _index(cfg, lam), guard, kind or cfg.kind)
    logger.info(f"Running {cfg.replications} {kind or cfg.kind} replications at lambda={lam}")
    return pool.map(run, range(cfg.replications))


@dataclass(frozen=True, slots=True)
class OracleDraw:
    value: float
    """h of the typical cell; NaN when the draw was rejected."""

    truncated_weight: float
    """1{Vol(W - K0) >= lambda / 2}."""

    window_weight: float
    """Vol(W n (W - K0)) / Vol(W - K0)."""


def _overlap(window: Box, lower: Sequence[float], upper: Sequence[float]) -> float:
    return math.prod(
        max(0.0, min(hi, u) - max(lo, v))
        for lo, hi, v, u in zip(window.lower, window.upper, lower, upper)
    )


def oracle_replication(cfg: ExperimentConfig, lam_index: int, guard: float, replication: int) -> OracleDraw:
    lam = cfg.lambda_values[lam_index]
    draw = draw_typical(
        cfg.model,
        cfg.mark_dist,
        guard,
        seed_path(cfg.master_seed, Stream.typical, lam_index, replication),
        cfg.kernel,
        cfg.intensity,
        cfg.max_guard_doublings,
    )
    if draw.rejected:
        return OracleDraw(math.nan, math.nan, math.nan)
    value = evaluate(cfg.characteristic, draw.cell)
    if not draw.cell.bounded:
        return OracleDraw(value, 1.0, 1.0)

    window = Box.centered(lam)
    box = draw.cell.bounding_box()
    erosion = erosion_volume(window, box)
    if erosion <= 0.0:
        return OracleDraw(value, 0.0, 0.0)
    # W - K0 = [lower - min K0, upper - max K0] for a generator at the origin
    lower = [lo - c for lo, c in zip(window.lower, box.lower)]
    upper = [hi - c for hi, c in zip(window.upper, box.upper)]
    return OracleDraw(value, 1.0 if erosion >= lam / 2.0 else 0.0, _overlap(window, lower, upper) / erosion)


def replicate_oracle(
    cfg: ExperimentConfig,
    lam: float,
    guard: float,
    pool: ReplicationPool | None = None,
) -> list[OracleDraw]:
    pool = pool or ReplicationPool()
    return pool.map(partial(oracle_replication, cfg, _index(cfg, lam), guard), range(cfg.replications))


def _predicted(kind: EstimatorKind, draws: Sequence[OracleDraw], intensity: float) -> list[float]:
    """Per-draw terms whose mean is the expectation of the estimator of the given kind."""
    out = []
    for d in draws:
        weight = 1.0
        if kind.truncated:
            weight *= d.truncated_weight
        if kind in (EstimatorKind.window_sample, EstimatorKind.truncated_window_sample):
            weight *= d.window_weight
        out.append(intensity * d.value * weight)
    return out


def predicted_mean(
    cfg: ExperimentConfig,
    lam: float,
    guard: float,
    pool: ReplicationPool | None = None,
) -> float:
    """Expectation of the estimator of cfg.kind at lam, from typical-cell draws."""
    draws = [d for d in replicate_oracle(cfg, lam, guard, pool) if not math.isnan(d.value)]
    check_rejections(cfg.replications - len(draws), cfg.replications, "typical cells")
    if not draws:
        raise NotStabilizedError(f"Every typical cell draw at lambda={lam} was rejected")
    return math.fsum(_predicted(cfg.kind, draws, cfg.intensity)) / len(draws)


@dataclass(frozen=True, slots=True)
class UnbiasednessResult:
    lam: float
    guard: float
    estimator: SummaryStats
    oracle: SummaryStats
    """Intensity times h of the typical cell."""

    predicted: SummaryStats
    """Oracle reweighted by the bias identity of the estimator kind."""

    moment_p: float
    empirical_moment: float
    """E |xi(0, eta)|^p over the oracle draws."""

    n_rejected: int
    records: list[ReplicationRecord] = field(default_factory=list)
    oracle_values: list[float] = field(default_factory=list)

    @property
    def difference(self) -> float:
        return self.estimator.mean - self.oracle.mean

    @property
    def combined_stderr(self) -> float:
        return math.hypot(self.estimator.stderr_mean, self.oracle.stderr_mean)

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda": self.lam,
            "guard": self.guard,
            "estimator": self.estimator.to_dict(),
            "oracle": self.oracle.to_dict(),
            "predicted": self.predicted.to_dict(),
            "difference": self.difference,
            "combined_stderr": self.combined_stderr,
            "moment_p": self.moment_p,
            "empirical_moment": self.empirical_moment,
            "n_rejected_typical": self.n_rejected,
            "n_unbounded": sum(r.n_unbounded for r in self.records),
            "n_cells_excluded_threshold": sum(r.n_cells_excluded_threshold for r in self.records),
        }


def run_unbiasedness_experiment(
    cfg: ExperimentConfig,
    lam: float | None = None,
    guard: float | None = None,
    pool: ReplicationPool | None = None,
) -> UnbiasednessResult:
    """
    Replicates the estimator over fresh samples and, independently, the
    typical-cell oracle at one window volume (the largest by default).
    """
    lam = max(cfg.lambda_values) if lam is None else lam
    guard = _guard(cfg, guard, pool)
    records = replicate_estimates(cfg, lam, guard, pool=pool)
    draws = replicate_oracle(cfg, lam, guard, pool)

    accepted = [d for d in draws if not math.isnan(d.value)]
    rejected = len(draws) - len(accepted)
    check_rejections(rejected, len(draws), "typical cells")
    oracle_values = [cfg.intensity * d.value for d in accepted]
    i = _index(cfg, lam)
    return UnbiasednessResult(
        lam=lam,
        guard=guard,
        estimator=summarize([r.value for r in records], lam, seed_path(cfg.master_seed, Stream.bootstrap, i, 0)),
        oracle=summarize(oracle_values, lam, seed_path(cfg.master_seed, Stream.bootstrap, i, 1)),
        predicted=summarize(_predicted(cfg.kind, accepted, cfg.intensity), lam, seed_path(cfg.master_seed, Stream.bootstrap, i, 2)),
        moment_p=cfg.moment_p,
        empirical_moment=moment([d.value for d in accepted], cfg.moment_p),
        n_rejected=rejected,
        records=records,
        oracle_values=oracle_values,
    )


@dataclass(frozen=True, slots=True)
class LambdaSummary:
    lam: float
    stats: SummaryStats
    records: list[ReplicationRecord] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {"lambda": self.lam, **self.stats.to_dict()}


def run_variance_experiment(
    cfg: ExperimentConfig,
    guard: float | None = None,
    pool: ReplicationPool | None = None,
    records: Sequence[list[ReplicationRecord]] | None = None,
) -> list[LambdaSummary]:
    """
    lambda * Var of a truncated estimator for every window volume. records,
    one list per lambda, reuses replications already run with this guard.
    """
    if not cfg.kind.truncated:
        raise InvalidParameterError(f"Variance asymptotics concern the truncated estimators, got {cfg.kind}")
    if records is not None and len(records) != len(cfg.lambda_values):
        raise InvalidParameterError(f"Expected {len(cfg.lambda_values)} replication lists, got {len(records)}")
    guard = _guard(cfg, guard, pool)
    out = []
    for i, lam in enumerate(cfg.lambda_values):
        runs = replicate_estimates(cfg, lam, guard, pool=pool) if records is None else records[i]
        summary = summarize([r.value for r in runs], lam, seed_path(cfg.master_seed, Stream.bootstrap, i, 0))
        logger.info(f"lambda={lam}: lambda*Var={summary.lambda_var:.6g} +- {summary.stderr_lambda_var:.3g}")
        out.append(LambdaSummary(lam, summary, runs))
    return out


@dataclass(frozen=True, slots=True)
class CltResult:
    lam: float
    standardized: np.ndarray
    ks: KSResult
    ks_oracle: KSResult | None = None
    """KS result when centering at the oracle mean instead of the sample mean."""

    records: list[ReplicationRecord] = field(default_factory=list)

    def qq_rows(self) -> list[dict[str, float]]:
        z = np.sort(self.standardized)
        n = len(z)
        theoretical = norm.ppf((np.arange(1, n + 1) - 0.5) / n)
        return [{"theoretical": float(t), "sample": float(s)} for t, s in zip(theoretical, z)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda": self.lam,
            "ks": self.ks.to_dict(),
            "ks_oracle_centered": self.ks_oracle.to_dict() if self.ks_oracle else None,
        }


def clt_from_values(values: Sequence[float], lam: float, oracle_mean: float | None = None) -> CltResult:
    """
    Standardizes sqrt(lambda) (H - mean) by its sample standard deviation
    and tests it against the standard normal law.
    """
    data = np.asarray(values, dtype=float)
    scaled = math.sqrt(lam) * (data - math.fsum(data) / len(data))
    sd = float(np.std(scaled, ddof=1)) if len(data) > 1 else 0.0
    if not sd > 0:
        raise DegenerateSampleError("The replications have zero sample variance")
    standardized = scaled / sd
    ks_oracle = None
    if oracle_mean is not None:
        ks_oracle = ks_statistic(math.sqrt(lam) * (data - oracle_mean) / sd, 0.0, 1.0)
    return CltResult(lam, standardized, ks_statistic(standardized, 0.0, 1.0), ks_oracle)


def run_clt_experiment(
    cfg: ExperimentConfig,
    lam: float,
    guard: float | None = None,
    oracle_mean: float | None = None,
    pool: ReplicationPool | None = None,
) -> CltResult:
    if cfg.replications < MIN_CLT_REPLICATIONS:
        raise InvalidParameterError(f"CLT runs need >= {MIN_CLT_REPLICATIONS} replications, got {cfg.replications}")
    guard = _guard(cfg, guard, pool)
    records = replicate_estimates(cfg, lam, guard, pool=pool)
    result = clt_from_values([r.value for r in records], lam, oracle_mean)
    logger.info(f"CLT at lambda={lam}: KS={result.ks.statistic:.4g}, p={result.ks.p_value:.4g}")
    return CltResult(result.lam, result.standardized, result.ks, result.ks_oracle, records)


@dataclass(frozen=True, slots=True)
class ConsistencyRow:
    lam: float
    naive: SummaryStats
    minus_sampling: SummaryStats

    @property
    def difference(self) -> float:
        return abs(self.naive.mean - self.minus_sampling.mean)

    @property
    def stderr_difference(self) -> float:
        return math.hypot(self.naive.stderr_mean, self.minus_sampling.stderr_mean)

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda": self.lam,
            "naive": self.naive.to_dict(),
            "truncated_window_sample": self.minus_sampling.to_dict(),
            "difference": self.difference,
            "stderr_difference": self.stderr_difference,
        }

    def to_row(self) -> dict[str, Any]:
        return {
            "lambda": self.lam,
            "naive_mean": self.naive.mean,
            "naive_stderr_mean": self.naive.stderr_mean,
            "truncated_mean": self.minus_sampling.mean,
            "truncated_stderr_mean": self.minus_sampling.stderr_mean,
            "difference": self.difference,
            "stderr_difference": self.stderr_difference,
        }


def run_consistency_experiment(
    cfg: ExperimentConfig,
    guard: float | None = None,
    pool: ReplicationPool | None = None,
) -> list[ConsistencyRow]:
    """
    Naive and truncated window-sample means on the same samples for every
    window volume; their difference shrinks as lambda grows.
    """
    guard = _guard(cfg, guard, pool)
    rows = []
    for i, lam in enumerate(cfg.lambda_values):
        naive = replicate_estimates(cfg, lam, guard, EstimatorKind.naive, pool)
        minus = replicate_estimates(cfg, lam, guard, EstimatorKind.truncated_window_sample, pool)
        rows.append(ConsistencyRow(
            lam,
            summarize([r.value for r in naive], lam, seed_path(cfg.master_seed, Stream.bootstrap, i, 0)),
            summarize([r.value for r in minus], lam, seed_path(cfg.master_seed, Stream.bootstrap, i, 1)),
        ))
    return rows
