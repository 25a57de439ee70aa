"""Search-space domain: bounded dimensions, unit-cube normalization, candidate grids.

All optimization logic downstream (smoothing radii, density radii, kernels,
acquisition) operates in the normalized unit hypercube; this module owns the
bijection between raw parameter units and [0, 1]^d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, DomainError
from .rng import rng_from

#: Hard cap on full candidate grids; above this the caller should fall back
#: to random candidate pools.
GRID_CAP = 100_000

_SCALES = ("linear", "log10")


@dataclass(frozen=True)
class Dimension:
    """One named, bounded search dimension.

    ``scale="log10"`` maps the value through log10 before the affine map to
    [0, 1]; use it for parameters like learning rates that live on orders of
    magnitude.
    """

    name: str
    lower: float
    upper: float
    scale: str = "linear"

    def __post_init__(self) -> None:
        if self.scale not in _SCALES:
            raise DomainError(f"dimension {self.name!r}: unknown scale {self.scale!r}")
        if not (self.lower < self.upper):
            raise DomainError(
                f"dimension {self.name!r}: lower ({self.lower}) must be < upper ({self.upper})"
            )
        if self.scale == "log10" and self.lower <= 0:
            raise DomainError(f"dimension {self.name!r}: log10 scale requires lower > 0")

    def to_unit(self, value: float) -> float:
        if not (self.lower <= value <= self.upper):
            raise DomainError(
                f"dimension {self.name!r}: value {value} outside [{self.lower}, {self.upper}]"
            )
        if self.scale == "log10":
            lo, hi = math.log10(self.lower), math.log10(self.upper)
            return (math.log10(value) - lo) / (hi - lo)
        return (value - self.lower) / (self.upper - self.lower)

    def from_unit(self, t: float) -> float:
        if self.scale == "log10":
            lo, hi = math.log10(self.lower), math.log10(self.upper)
            return 10.0 ** (lo + t * (hi - lo))
        return self.lower + t * (self.upper - self.lower)


@dataclass(frozen=True)
class SearchSpace:
    """Ordered collection of dimensions with unit-cube normalization.

    Points are plain float arrays of shape (d,) with every coordinate in
    [0, 1]; batches of points are arrays of shape (n, d). Instances are
    immutable and safe to share across concurrent runs.
    """

    dims: tuple[Dimension, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "dims", tuple(self.dims))
        if not self.dims:
            raise DomainError("search space needs at least one dimension")
        names = [d.name for d in self.dims]
        if len(set(names)) != len(names):
            raise DomainError(f"duplicate dimension names: {names}")

    @property
    def dimension(self) -> int:
        return len(self.dims)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dims)

    def normalize(self, raw: np.ndarray) -> np.ndarray:
        """Map a raw-unit vector into the unit hypercube.

        Raises DomainError naming the offending dimension when a value is
        out of bounds or the vector length does not match.
        """
        raw = np.asarray(raw, dtype=float)
        if raw.shape != (self.dimension,):
            raise DomainError(
                f"expected {self.dimension} raw values, got shape {raw.shape}"
            )
        return np.array([d.to_unit(v) for d, v in zip(self.dims, raw)], dtype=float)

    def denormalize(self, point: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`normalize`."""
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dimension,):
            raise DomainError(
                f"expected {self.dimension} coordinates, got shape {point.shape}"
            )
        return np.array([d.from_unit(t) for d, t in zip(self.dims, point)], dtype=float)

    def meshgrid(self, points_per_dim: int, cap: int = GRID_CAP) -> np.ndarray:
        """Full Cartesian grid in the unit cube, endpoints included.

        Ordering is row-major with the last dimension varying fastest, so
        downstream argmax tie-breaking is reproducible. Raises BudgetError
        when the grid would exceed ``cap`` points.
        """
        if points_per_dim < 2:
            raise DomainError("points_per_dim must be >= 2")
        size = points_per_dim**self.dimension
        if size > cap:
            raise BudgetError(
                f"grid of {size} points exceeds cap {cap}; "
                "fall back to random candidate sampling"
            )
        axis = np.linspace(0.0, 1.0, points_per_dim)
        grids = np.meshgrid(*([axis] * self.dimension), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def sample_uniform(self, count: int, rng_seed: int) -> np.ndarray:
        """``count`` i.i.d. uniform points in [0,1]^d, reproducible per seed."""
        if count < 1:
            raise DomainError("count must be >= 1")
        return rng_from(rng_seed).random((count, self.dimension))


def unit_space(dimension: int, prefix: str = "x") -> SearchSpace:
    """Convenience [0,1]^d space with generated dimension names."""
    return SearchSpace(
        dims=tuple(Dimension(f"{prefix}{i}", 0.0, 1.0) for i in range(dimension))
    )
