import math
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path

from tesslab.core.errors import InvalidParameterError
from tesslab.core.models.characteristic import Characteristic
from tesslab.core.models.experiment import ExperimentConfig


class Subcommand(StrEnum):
    sample = "sample"
    tessellate = "tessellate"
    estimate = "estimate"
    experiment = "experiment"
    sigma2 = "sigma2"
    tails = "tails"
    clt = "clt"


@dataclass(frozen=True, slots=True)
class RealizationOptions:
    """Which single realization sample, tessellate and estimate work on."""
    lam: float | None = None
    """Window volume; the largest of the experiment by default."""

    replication: int = 0
    t_grid: tuple[float, ...] = ()
    """Thresholds of the distribution function estimate, none by default."""

    base: Characteristic | None = None

    def __post_init__(self) -> None:
        if self.replication < 0:
            raise InvalidParameterError(f"replication must be >= 0, got {self.replication}")

    def resolve_lambda(self, experiment: ExperimentConfig) -> tuple[int, float]:
        lam = max(experiment.lambda_values) if self.lam is None else self.lam
        if lam not in experiment.lambda_values:
            raise InvalidParameterError(f"lambda {lam} is not one of {experiment.lambda_values}")
        return experiment.lambda_values.index(lam), lam


@dataclass(frozen=True, slots=True)
class Sigma2Options:
    r_max: float | None = None
    """Truncation radius; None resolves it from a pilot run."""

    n_singles: int = 1000
    n_pairs: int = 1000


@dataclass(frozen=True, slots=True)
class TailsOptions:
    n: int = 10_000
    quantiles: tuple[float, float] = (0.9, 0.999)

    def __post_init__(self) -> None:
        low, high = self.quantiles
        if not 0.0 < low < high < 1.0:
            raise InvalidParameterError(f"Tail quantiles need 0 < low < high < 1, got {self.quantiles}")


@dataclass(frozen=True, slots=True)
class CltOptions:
    lam: float | None = None
    oracle_centering: bool = True


@dataclass(frozen=True, slots=True)
class RunConfig:
    """Everything one tess-lab invocation needs, free of any settings type."""
    subcommand: Subcommand
    experiment: ExperimentConfig
    output_dir: Path
    emit_ledger: bool = False
    emit_cells: bool = False
    output_format: str = "json"
    pilot_size: int = 10_000
    realization: RealizationOptions = field(default_factory=RealizationOptions)
    sigma2: Sigma2Options = field(default_factory=Sigma2Options)
    tails: TailsOptions = field(default_factory=TailsOptions)
    clt: CltOptions = field(default_factory=CltOptions)

    def __post_init__(self) -> None:
        if self.pilot_size < 2:
            raise InvalidParameterError(f"pilot_size must be >= 2, got {self.pilot_size}")
        if self.sigma2.r_max is not None and not (self.sigma2.r_max > 0 and math.isfinite(self.sigma2.r_max)):
            raise InvalidParameterError(f"sigma2.r_max must be finite and > 0, got {self.sigma2.r_max}")
