from __future__ import annotations

import math
from dataclasses import dataclass
from enum import StrEnum
from typing import Any, Self

from tesslab.core.errors import InvalidParameterError


class CharacteristicKind(StrEnum):
    volume = "volume"
    boundary_measure = "boundary_measure"
    diameter = "diameter"
    circumradius = "circumradius"
    inradius = "inradius"
    vertex_count = "vertex_count"
    constant = "constant"
    indicator_volume_leq = "indicator_volume_leq"
    indicator_leq = "indicator_leq"
    scaled = "scaled"


@dataclass(frozen=True, slots=True)
class Characteristic:
    """
    A geometric characteristic h of a cell.

    Indicator variants evaluate 1{base(C) <= t}; they may not wrap another
    indicator. Scaled multiplies its base by a constant factor.
    """
    kind: CharacteristicKind
    t: float | None = None
    """Threshold of the indicator variants."""

    base: Characteristic | None = None
    """Wrapped characteristic of IndicatorCharacteristicLeq and Scaled."""

    factor: float = 1.0
    """Value of Constant and multiplier of Scaled."""

    def __post_init__(self) -> None:
        match self.kind:
            case CharacteristicKind.indicator_volume_leq | CharacteristicKind.indicator_leq:
                if self.t is None or not self.t > 0:
                    raise InvalidParameterError(f"Indicator threshold must be > 0, got {self.t}")
            case CharacteristicKind.constant | CharacteristicKind.scaled:
                if not math.isfinite(self.factor):
                    raise InvalidParameterError(f"Factor must be finite, got {self.factor}")
        if self.kind in (CharacteristicKind.indicator_leq, CharacteristicKind.scaled):
            if self.base is None:
                raise InvalidParameterError(f"{self.kind} needs a base characteristic")
        if self.kind is CharacteristicKind.indicator_leq and self.base.is_indicator:
            raise InvalidParameterError("Indicators cannot be nested")

    @classmethod
    def volume(cls) -> Self:
        return cls(CharacteristicKind.volume)

    @classmethod
    def boundary_measure(cls) -> Self:
        return cls(CharacteristicKind.boundary_measure)

    @classmethod
    def diameter(cls) -> Self:
        return cls(CharacteristicKind.diameter)

    @classmethod
    def circumradius(cls) -> Self:
        return cls(CharacteristicKind.circumradius)

    @classmethod
    def inradius(cls) -> Self:
        return cls(CharacteristicKind.inradius)

    @classmethod
    def vertex_count(cls) -> Self:
        return cls(CharacteristicKind.vertex_count)

    @classmethod
    def constant(cls, value: float) -> Self:
        return cls(CharacteristicKind.constant, factor=value)

    @classmethod
    def indicator_volume_leq(cls, t: float) -> Self:
        return cls(CharacteristicKind.indicator_volume_leq, t=t)

    @classmethod
    def indicator_leq(cls, base: Characteristic, t: float) -> Self:
        return cls(CharacteristicKind.indicator_leq, t=t, base=base)

    @classmethod
    def scaled(cls, base: Characteristic, c: float) -> Self:
        return cls(CharacteristicKind.scaled, base=base, factor=c)

    @property
    def is_indicator(self) -> bool:
        if self.kind is CharacteristicKind.scaled:
            return self.base.is_indicator
        return self.kind in (CharacteristicKind.indicator_volume_leq, CharacteristicKind.indicator_leq)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"kind": self.kind.value}
        if self.t is not None:
            data["t"] = self.t
        if self.base is not None:
            data["base"] = self.base.to_dict()
        if self.kind in (CharacteristicKind.constant, CharacteristicKind.scaled):
            data["factor"] = self.factor
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Self:
        base = data.get("base")
        return cls(
            CharacteristicKind(data["kind"]),
            t=data.get("t"),
            base=cls.from_dict(base) if base is not None else None,
            factor=float(data.get("factor", 1.0)),
        )

    def __str__(self) -> str:
        match self.kind:
            case CharacteristicKind.indicator_volume_leq:
                return f"1{{volume<={self.t:g}}}"
            case CharacteristicKind.indicator_leq:
                return f"1{{{self.base}<={self.t:g}}}"
            case CharacteristicKind.scaled:
                return f"{self.factor:g}*{self.base}"
            case CharacteristicKind.constant:
                return f"{self.factor:g}"
            case _:
                return self.kind.value
