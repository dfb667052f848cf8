from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum
from typing import Any, Self

import numpy as np

from tesslab.core.errors import DegenerateInputError, InvalidParameterError
from tesslab.core.models.point import MarkedPoint


class WeightModel(StrEnum):
    """The weight function rho defining the tessellation."""
    voronoi = "voronoi"
    laguerre = "laguerre"
    johnson_mehl = "johnson_mehl"

    @property
    def has_linear_bisectors(self) -> bool:
        return self is not WeightModel.johnson_mehl

    def effective_mu(self, mark_max: float) -> float:
        """Mark bound entering the cone construction; marks are inert for Voronoi."""
        return 0.0 if self is WeightModel.voronoi else mark_max


class KernelMethod(StrEnum):
    exact = "exact"
    raster = "raster"


@dataclass(frozen=True, slots=True)
class Kernel:
    """Choice of cell kernel: exact half-plane clipping or a raster grid."""
    method: KernelMethod = KernelMethod.exact
    grid_h: float | None = None

    def __post_init__(self) -> None:
        if self.method is KernelMethod.raster and not (self.grid_h and self.grid_h > 0):
            raise InvalidParameterError(f"Raster kernel needs grid_h > 0, got {self.grid_h}")

    @classmethod
    def exact(cls) -> Self:
        return cls(KernelMethod.exact)

    @classmethod
    def raster(cls, grid_h: float) -> Self:
        return cls(KernelMethod.raster, grid_h)

    def check(self, model: WeightModel) -> None:
        if self.method is KernelMethod.exact and not model.has_linear_bisectors:
            raise InvalidParameterError("Johnson-Mehl cells are only available on a raster kernel")

    def to_dict(self) -> dict[str, Any]:
        if self.method is KernelMethod.exact:
            return {"method": "exact"}
        return {"method": "raster", "grid_h": self.grid_h}


@dataclass(frozen=True, slots=True)
class HalfSpace2:
    """The closed half-plane {y : <normal, y> <= offset}."""
    normal: tuple[float, float]
    offset: float

    def __post_init__(self) -> None:
        if self.normal[0] == 0.0 and self.normal[1] == 0.0:
            raise DegenerateInputError("Half-plane normal must be nonzero")

    def contains(self, y: Sequence[float], tol: float = 0.0) -> bool:
        return self.normal[0] * y[0] + self.normal[1] * y[1] <= self.offset + tol

    def complement(self) -> HalfSpace2:
        """Closure of the complementary half-plane; same boundary line."""
        return HalfSpace2((-self.normal[0], -self.normal[1]), -self.offset)


@dataclass(frozen=True, slots=True)
class BoundingBox:
    """Axis-parallel extents of a cell, possibly flat."""
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        if not all(lo <= hi for lo, hi in zip(self.lower, self.upper)):
            raise InvalidParameterError(f"Bounding box corners out of order {self.lower} {self.upper}")

    @classmethod
    def of(cls, points: np.ndarray) -> Self:
        return cls(tuple(map(float, points.min(axis=0))), tuple(map(float, points.max(axis=0))))

    @property
    def extents(self) -> tuple[float, ...]:
        return tuple(hi - lo for lo, hi in zip(self.lower, self.upper))


class CellShape(StrEnum):
    polygon = "polygon"
    raster = "raster"
    empty = "empty"
    unbounded = "unbounded"


@dataclass(frozen=True, slots=True, eq=False)
class Cell:
    """
    The cell C(x, P) of a generator.

    Polygons carry counterclockwise, strictly convex vertices. Rasters
    carry a boolean mask indexed [i, j] whose square (i, j) covers
    [origin + (i, j) * grid_h, origin + (i + 1, j + 1) * grid_h]; masks are
    cropped to their tight extents and the origin stays on the grid that
    produced them.
    """
    shape: CellShape
    generator: MarkedPoint
    vertices: np.ndarray | None = None
    origin: tuple[float, float] | None = None
    grid_h: float | None = None
    mask: np.ndarray | None = None

    @classmethod
    def polygon(cls, generator: MarkedPoint, vertices: np.ndarray) -> Self:
        v = np.array(vertices, dtype=float).reshape(-1, 2)
        v.flags.writeable = False
        return cls(CellShape.polygon, generator, vertices=v)

    @classmethod
    def raster(cls, generator: MarkedPoint, origin: tuple[float, float], grid_h: float, mask: np.ndarray) -> Self:
        m = np.array(mask, dtype=bool)
        m.flags.writeable = False
        return cls(CellShape.raster, generator, origin=origin, grid_h=grid_h, mask=m)

    @classmethod
    def empty(cls, generator: MarkedPoint) -> Self:
        return cls(CellShape.empty, generator)

    @classmethod
    def unbounded(cls, generator: MarkedPoint) -> Self:
        return cls(CellShape.unbounded, generator)

    @property
    def bounded(self) -> bool:
        return self.shape in (CellShape.polygon, CellShape.raster)

    def corner_points(self) -> np.ndarray:
        """Vertices of a polygon, or the corners of every square of a raster."""
        if self.shape is CellShape.polygon:
            return self.vertices
        if self.shape is CellShape.raster:
            i, j = np.nonzero(self.mask)
            h = self.grid_h
            ox, oy = self.origin
            xs = np.concatenate([i, i + 1, i, i + 1]) * h + ox
            ys = np.concatenate([j, j, j + 1, j + 1]) * h + oy
            return np.unique(np.column_stack([xs, ys]), axis=0)
        raise InvalidParameterError(f"A {self.shape} cell has no geometry")

    def square_centers(self) -> np.ndarray:
        i, j = np.nonzero(self.mask)
        return np.column_stack([(i + 0.5) * self.grid_h + self.origin[0], (j + 0.5) * self.grid_h + self.origin[1]])

    def bounding_box(self) -> BoundingBox:
        if self.shape is CellShape.raster:
            i, j = np.nonzero(self.mask)
            h = self.grid_h
            ox, oy = self.origin
            return BoundingBox((ox + i.min() * h, oy + j.min() * h), (ox + (i.max() + 1) * h, oy + (j.max() + 1) * h))
        return BoundingBox.of(self.corner_points())

    def translate(self, v: Sequence[float]) -> Cell:
        g = self.generator.translate(v)
        match self.shape:
            case CellShape.polygon:
                return Cell.polygon(g, self.vertices + np.asarray(v))
            case CellShape.raster:
                return Cell.raster(g, (self.origin[0] + v[0], self.origin[1] + v[1]), self.grid_h, self.mask)
            case _:
                return Cell(self.shape, g)

    def same_as(self, other: Cell, tol: float = 1e-9) -> bool:
        """Vertex-wise equality within tol for polygons, identity for masks."""
        if self.shape is not other.shape:
            return False
        match self.shape:
            case CellShape.polygon:
                a, b = _canonical(self.vertices), _canonical(other.vertices)
                return a.shape == b.shape and bool(np.all(np.abs(a - b) <= tol))
            case CellShape.raster:
                return (
                    self.grid_h == other.grid_h
                    and np.allclose(self.origin, other.origin, rtol=0.0, atol=tol)
                    and self.mask.shape == other.mask.shape
                    and bool(np.array_equal(self.mask, other.mask))
                )
            case _:
                return True

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"shape": self.shape.value, "generator": self.generator.to_dict()}
        if self.shape is CellShape.polygon:
            data["vertices"] = self.vertices.tolist()
        elif self.shape is CellShape.raster:
            data["origin"] = list(self.origin)
            data["grid_h"] = self.grid_h
            data["mask_shape"] = list(self.mask.shape)
            data["mask_rle"] = run_length_encode(self.mask)
        return data


def _canonical(vertices: np.ndarray) -> np.ndarray:
    start = int(np.lexsort((vertices[:, 1], vertices[:, 0]))[0])
    return np.roll(vertices, -start, axis=0)


def run_length_encode(mask: np.ndarray) -> list[int]:
    """
    Row-major run lengths of a boolean mask, starting with a run of False
    (possibly of length 0).
    """
    flat = np.asarray(mask, dtype=bool).ravel()
    if flat.size == 0:
        return []
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate([[0], change, [flat.size]])
    runs = np.diff(bounds).tolist()
    return runs if not flat[0] else [0, *runs]


def run_length_decode(runs: Sequence[int], shape: Sequence[int]) -> np.ndarray:
    values = np.arange(len(runs)) % 2 == 1
    return np.repeat(values, runs).reshape(tuple(shape))
