import math
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

from tesslab.core.models.point import MarkedPoint


class EstimatorKind(StrEnum):
    """
    The five statistics: minus-sampling over window or full generators,
    their truncated versions requiring Vol(W - C) >= lambda / 2, and the
    naive window average of scores.
    """
    window_sample = "window_sample"
    full_sample = "full_sample"
    truncated_window_sample = "truncated_window_sample"
    truncated_full_sample = "truncated_full_sample"
    naive = "naive"

    @property
    def truncated(self) -> bool:
        return self in (EstimatorKind.truncated_window_sample, EstimatorKind.truncated_full_sample)

    @property
    def full(self) -> bool:
        return self in (EstimatorKind.full_sample, EstimatorKind.truncated_full_sample)


class Exclusion(StrEnum):
    not_contained = "not_contained"
    below_threshold = "below_threshold"
    empty = "empty"
    unbounded = "unbounded"


LEDGER_COLUMNS = ("generator_x", "generator_y", "mark", "h", "erosion_volume", "included", "reason")


@dataclass(frozen=True, slots=True)
class Contribution:
    """One ledger line: the decision taken for a single generator."""
    generator: MarkedPoint
    h_value: float
    erosion_volume: float
    included: bool
    reason: Exclusion | None = None

    @property
    def weight(self) -> float:
        return self.h_value / self.erosion_volume if self.included else 0.0

    def to_row(self) -> dict[str, Any]:
        return {
            "generator_x": self.generator.position[0],
            "generator_y": self.generator.position[1],
            "mark": self.generator.mark,
            "h": self.h_value,
            "erosion_volume": self.erosion_volume,
            "included": int(self.included),
            "reason": self.reason.value if self.reason else "",
        }


@dataclass(frozen=True, slots=True)
class EstimateResult:
    value: float
    lam: float
    """Window volume lambda."""

    kind: EstimatorKind
    contributions: tuple[Contribution, ...] = field(default=())
    """Ledger sorted by generator (position, mark)."""

    n_out_of_scope: int = 0
    """Carrier generators whose cell provably misses the window."""

    @property
    def n_included(self) -> int:
        return sum(1 for c in self.contributions if c.included)

    @property
    def n_excluded_threshold(self) -> int:
        return sum(1 for c in self.contributions if c.reason is Exclusion.below_threshold)

    @property
    def n_unbounded(self) -> int:
        return sum(1 for c in self.contributions if c.reason is Exclusion.unbounded)

    def recompute(self) -> float:
        if self.kind is EstimatorKind.naive:
            return math.fsum(c.h_value for c in self.contributions) / self.lam
        return math.fsum(c.weight for c in self.contributions)

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "lambda": self.lam,
            "kind": self.kind.value,
            "n_cells_included": self.n_included,
            "n_cells_excluded_threshold": self.n_excluded_threshold,
            "n_unbounded": self.n_unbounded,
            "n_out_of_scope": self.n_out_of_scope,
        }
