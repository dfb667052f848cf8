import math
from dataclasses import dataclass, field
from typing import Any

from tesslab.core.errors import InvalidParameterError
from tesslab.core.models.cell import Kernel, WeightModel
from tesslab.core.models.characteristic import Characteristic
from tesslab.core.models.estimate import EstimatorKind
from tesslab.core.models.point import MarkDistribution


@dataclass(frozen=True, slots=True)
class ExperimentConfig:
    """Description of a Monte Carlo experiment over one or more windows."""
    model: WeightModel
    characteristic: Characteristic
    mark_dist: MarkDistribution
    lambda_values: tuple[float, ...]
    replications: int
    intensity: float = 1.0
    kind: EstimatorKind = EstimatorKind.full_sample
    kernel: Kernel = field(default_factory=Kernel.exact)
    guard: float | None = None
    """Guard width; None means it is resolved from a pilot run."""

    master_seed: int = 0
    moment_p: float = 2.0
    """Order of the empirical moment E|xi|^p reported next to the summaries."""

    guard_cap_factor: float = 4.0
    max_guard_doublings: int = 3

    def __post_init__(self) -> None:
        if self.replications < 2:
            raise InvalidParameterError(f"replications must be >= 2, got {self.replications}")
        if not self.lambda_values or any(v <= 0 for v in self.lambda_values):
            raise InvalidParameterError("lambda_values must be positive")
        if any(b <= a for a, b in zip(self.lambda_values, self.lambda_values[1:])):
            raise InvalidParameterError("lambda_values must be strictly increasing")
        if not self.intensity > 0 or not math.isfinite(self.intensity):
            raise InvalidParameterError(f"intensity must be finite and > 0, got {self.intensity}")
        if self.guard is not None and self.guard < 0:
            raise InvalidParameterError(f"guard must be >= 0, got {self.guard}")
        if self.master_seed < 0:
            raise InvalidParameterError("master_seed must be >= 0")
        self.kernel.check(self.model)

    @property
    def mu(self) -> float:
        return self.model.effective_mu(self.mark_dist.mu_bound)

    def guard_cap(self, lam: float) -> float:
        return self.guard_cap_factor * lam ** 0.5


@dataclass(frozen=True, slots=True)
class SummaryStats:
    mean: float
    variance: float
    lambda_var: float
    """lambda times the sample variance."""

    stderr_mean: float
    stderr_lambda_var: float
    n: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "mean": self.mean,
            "variance": self.variance,
            "lambda_var": self.lambda_var,
            "stderr_mean": self.stderr_mean,
            "stderr_lambda_var": self.stderr_lambda_var,
            "n": self.n,
        }


@dataclass(frozen=True, slots=True)
class KSResult:
    statistic: float
    p_value: float
    n: int

    def to_dict(self) -> dict[str, Any]:
        return {"statistic": self.statistic, "p_value": self.p_value, "n": self.n}


@dataclass(frozen=True, slots=True)
class TailFit:
    """
    Fit of log P(D >= t) = a - rate * t^d over the upper quantile range,
    together with a free-exponent fit log(-log P(D >= t)) = b + alpha * log t.
    """
    thresholds: tuple[float, ...]
    log_survival: tuple[float, ...]
    fitted_rate: float
    fitted_exponent_alpha: float
    r_squared: float
    intercept: float = 0.0
    r_squared_free: float = float("nan")

    def to_dict(self) -> dict[str, Any]:
        return {
            "thresholds": list(self.thresholds),
            "log_survival": list(self.log_survival),
            "fitted_rate": self.fitted_rate,
            "fitted_exponent_alpha": self.fitted_exponent_alpha,
            "r_squared": self.r_squared,
            "intercept": self.intercept,
            "r_squared_free": self.r_squared_free,
        }


REPLICATION_COLUMNS = (
    "replication", "lambda", "kind", "value", "n_cells_included", "n_cells_excluded_threshold", "n_unbounded",
)


@dataclass(frozen=True, slots=True)
class ReplicationRecord:
    """One row of replications.csv."""
    replication: int
    lam: float
    kind: str
    value: float
    n_cells_included: int = 0
    n_cells_excluded_threshold: int = 0
    n_unbounded: int = 0
    guard: float = 0.0

    def to_row(self) -> dict[str, Any]:
        return {
            "replication": self.replication,
            "lambda": self.lam,
            "kind": self.kind,
            "value": self.value,
            "n_cells_included": self.n_cells_included,
            "n_cells_excluded_threshold": self.n_cells_excluded_threshold,
            "n_unbounded": self.n_unbounded,
        }
