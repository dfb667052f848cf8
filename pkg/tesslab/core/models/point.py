from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from enum import StrEnum
from typing import Any, Self

import numpy as np

from tesslab.core.errors import DegenerateInputError, InvalidParameterError


@dataclass(frozen=True, slots=True, order=True)
class MarkedPoint:
    """
    A generator of the tessellation: a location together with its mark.
    Ordering is lexicographic on (position, mark), which is the tie-break
    rule of every cell kernel.
    """
    position: tuple[float, ...]
    mark: float = 0.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(c) for c in self.position):
            raise InvalidParameterError(f"Non finite position {self.position}")
        if not (self.mark >= 0.0 and math.isfinite(self.mark)):
            raise InvalidParameterError(f"Mark must be finite and >= 0, got {self.mark}")

    @property
    def dim(self) -> int:
        return len(self.position)

    def translate(self, v: Sequence[float]) -> MarkedPoint:
        return MarkedPoint(tuple(c + s for c, s in zip(self.position, v)), self.mark)

    def to_dict(self) -> dict[str, Any]:
        return {"position": list(self.position), "mark": self.mark}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Self:
        return cls(tuple(float(c) for c in data["position"]), float(data.get("mark", 0.0)))


class MarkLaw(StrEnum):
    point_mass = "point_mass"
    uniform = "uniform"
    discrete = "discrete"


@dataclass(frozen=True, slots=True)
class MarkDistribution:
    """
    Law Q_M of the marks. Every law is supported on [0, mu_bound].
    """
    law: MarkLaw
    low: float = 0.0
    high: float = 0.0
    values: tuple[float, ...] = ()
    weights: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        match self.law:
            case MarkLaw.point_mass:
                if self.low < 0:
                    raise InvalidParameterError(f"Point mass must be >= 0, got {self.low}")
            case MarkLaw.uniform:
                if not 0 <= self.low < self.high:
                    raise InvalidParameterError(
                        f"Uniform marks need 0 <= a < b, got ({self.low}, {self.high})"
                    )
            case MarkLaw.discrete:
                if not self.values or len(self.values) != len(self.weights):
                    raise InvalidParameterError("Discrete marks need matching values and weights")
                if min(self.values) < 0 or min(self.weights) < 0:
                    raise InvalidParameterError("Discrete marks need nonnegative values and weights")
                if not math.isclose(math.fsum(self.weights), 1.0, abs_tol=1e-12):
                    raise InvalidParameterError("Discrete mark weights must sum to 1")

    @classmethod
    def point_mass(cls, c: float) -> Self:
        return cls(MarkLaw.point_mass, low=c, high=c)

    @classmethod
    def uniform(cls, a: float, b: float) -> Self:
        return cls(MarkLaw.uniform, low=a, high=b)

    @classmethod
    def discrete(cls, values: Sequence[float], weights: Sequence[float]) -> Self:
        return cls(MarkLaw.discrete, values=tuple(values), weights=tuple(weights))

    @property
    def mu_bound(self) -> float:
        if self.law is MarkLaw.discrete:
            return max(v for v, w in zip(self.values, self.weights) if w > 0)
        return self.high

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        match self.law:
            case MarkLaw.point_mass:
                return np.full(n, self.low, dtype=float)
            case MarkLaw.uniform:
                return rng.uniform(self.low, self.high, size=n)
            case _:
                idx = rng.choice(len(self.values), size=n, p=np.asarray(self.weights))
                return np.asarray(self.values, dtype=float)[idx]

    def to_dict(self) -> dict[str, Any]:
        match self.law:
            case MarkLaw.point_mass:
                return {"law": self.law.value, "c": self.low}
            case MarkLaw.uniform:
                return {"law": self.law.value, "a": self.low, "b": self.high}
            case _:
                return {"law": self.law.value, "values": list(self.values), "weights": list(self.weights)}


@dataclass(frozen=True, slots=True)
class Box:
    """Closed axis-parallel box [lower, upper]."""
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.lower) != len(self.upper) or not self.lower:
            raise InvalidParameterError("Box corners must share a positive dimension")
        if not all(lo < hi for lo, hi in zip(self.lower, self.upper)):
            raise DegenerateInputError(f"Degenerate box {self.lower} -> {self.upper}")

    @classmethod
    def centered(cls, volume: float, dim: int = 2) -> Self:
        """The observation window W_lambda = [-s/2, s/2]^d with s^d = volume."""
        if volume <= 0:
            raise InvalidParameterError(f"Window volume must be > 0, got {volume}")
        half = volume ** (1.0 / dim) / 2.0
        return cls((-half,) * dim, (half,) * dim)

    @classmethod
    def around(cls, points: np.ndarray, margin: float) -> Self:
        lo = points.min(axis=0) - margin
        hi = points.max(axis=0) + margin
        return cls(tuple(float(c) for c in lo), tuple(float(c) for c in hi))

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def sides(self) -> tuple[float, ...]:
        return tuple(hi - lo for lo, hi in zip(self.lower, self.upper))

    @property
    def volume(self) -> float:
        return math.prod(self.sides)

    @property
    def center(self) -> tuple[float, ...]:
        return tuple((lo + hi) / 2.0 for lo, hi in zip(self.lower, self.upper))

    def dilate(self, g: float) -> Box:
        if g < 0:
            raise InvalidParameterError(f"Guard must be >= 0, got {g}")
        return Box(tuple(c - g for c in self.lower), tuple(c + g for c in self.upper))

    def translate(self, v: Sequence[float]) -> Box:
        return Box(
            tuple(c + s for c, s in zip(self.lower, v)),
            tuple(c + s for c, s in zip(self.upper, v)),
        )

    def contains(self, positions: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(positions)
        return np.all((pts >= self.lower) & (pts <= self.upper), axis=1)

    def contains_box(self, other: Box) -> bool:
        return all(
            slo <= olo and ohi <= shi
            for slo, shi, olo, ohi in zip(self.lower, self.upper, other.lower, other.upper)
        )

    def contains_ball(self, center: Sequence[float], radius: float) -> bool:
        return all(
            lo <= c - radius and c + radius <= hi
            for lo, hi, c in zip(self.lower, self.upper, center)
        )

    def distance(self, positions: np.ndarray) -> np.ndarray:
        """Euclidean distance from each position to the box (0 inside)."""
        pts = np.atleast_2d(positions)
        gap = np.maximum(np.asarray(self.lower) - pts, 0.0) + np.maximum(pts - np.asarray(self.upper), 0.0)
        return np.linalg.norm(gap, axis=1)

    def to_dict(self) -> dict[str, Any]:
        return {"lower": list(self.lower), "upper": list(self.upper)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Self:
        return cls(tuple(map(float, data["lower"])), tuple(map(float, data["upper"])))


@dataclass(frozen=True, slots=True, eq=False)
class MarkedConfiguration:
    """
    Finite marked point configuration, trusted as a sample of the process
    only inside its carrier. Positions are stored as an (n, d) array and
    marks as an (n,) array; both are read-only.
    """
    positions: np.ndarray
    marks: np.ndarray
    carrier: Box

    def __post_init__(self) -> None:
        positions = np.array(self.positions, dtype=float).reshape(-1, self.carrier.dim)
        marks = np.array(self.marks, dtype=float).reshape(-1)
        if len(positions) != len(marks):
            raise InvalidParameterError("positions and marks differ in length")
        if len(marks) and (marks.min() < 0 or not np.isfinite(marks).all()):
            raise InvalidParameterError("Marks must be finite and >= 0")
        if not self.carrier.contains(positions).all():
            raise InvalidParameterError("Configuration has points outside its carrier")
        if len(np.unique(positions, axis=0)) != len(positions):
            raise DegenerateInputError("Duplicate positions in configuration")
        positions.flags.writeable = False
        marks.flags.writeable = False
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "marks", marks)

    @classmethod
    def empty(cls, carrier: Box) -> Self:
        return cls(np.empty((0, carrier.dim)), np.empty(0), carrier)

    @classmethod
    def from_points(cls, points: Sequence[MarkedPoint], carrier: Box | None = None) -> Self:
        dim = points[0].dim if points else (carrier.dim if carrier else 2)
        positions = np.array([p.position for p in points], dtype=float).reshape(-1, dim)
        marks = np.array([p.mark for p in points], dtype=float)
        if carrier is None:
            carrier = Box.around(positions, 1.0) if len(points) else Box((-1.0,) * dim, (1.0,) * dim)
        return cls(positions, marks, carrier)

    def __len__(self) -> int:
        return len(self.marks)

    def __iter__(self) -> Iterator[MarkedPoint]:
        for i in range(len(self)):
            yield self.point(i)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MarkedConfiguration):
            return NotImplemented
        return (
            self.carrier == other.carrier
            and np.array_equal(self.positions, other.positions)
            and np.array_equal(self.marks, other.marks)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def dim(self) -> int:
        return self.carrier.dim

    @property
    def mark_max(self) -> float:
        return float(self.marks.max()) if len(self) else 0.0

    def point(self, i: int) -> MarkedPoint:
        return MarkedPoint(tuple(float(c) for c in self.positions[i]), float(self.marks[i]))

    def index_of(self, p: MarkedPoint) -> int | None:
        hits = np.flatnonzero(np.all(self.positions == np.asarray(p.position), axis=1))
        return int(hits[0]) if hits.size else None

    def subset(self, keep: np.ndarray) -> MarkedConfiguration:
        return MarkedConfiguration(self.positions[keep], self.marks[keep], self.carrier)

    def without(self, p: MarkedPoint) -> MarkedConfiguration:
        i = self.index_of(p)
        if i is None:
            return self
        keep = np.ones(len(self), dtype=bool)
        keep[i] = False
        return self.subset(keep)

    def with_points(self, points: Sequence[MarkedPoint], carrier: Box | None = None) -> MarkedConfiguration:
        if not points:
            return self if carrier is None else MarkedConfiguration(self.positions, self.marks, carrier)
        extra = np.array([p.position for p in points], dtype=float).reshape(-1, self.dim)
        marks = np.concatenate([self.marks, [p.mark for p in points]])
        return MarkedConfiguration(np.vstack([self.positions, extra]), marks, carrier or self.carrier)

    def merge(self, other: MarkedConfiguration, carrier: Box) -> MarkedConfiguration:
        return MarkedConfiguration(
            np.vstack([self.positions, other.positions]),
            np.concatenate([self.marks, other.marks]),
            carrier,
        )

    def within(self, center: Sequence[float], radius: float) -> MarkedConfiguration:
        """Points in the closed ball B_radius(center); the carrier is kept."""
        dist = np.linalg.norm(self.positions - np.asarray(center), axis=1)
        return self.subset(dist <= radius)
