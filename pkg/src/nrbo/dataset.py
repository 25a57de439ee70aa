"""Trial storage and neighbor-based observation smoothing.

Each observation can be replaced by the arithmetic mean of all observations
within a Euclidean radius of its location (its own value always included, so
the neighborhood is never empty). The same radius-counting primitive also
backs the density reward used by the acquisition ensemble.

Distances are always Euclidean in normalized [0,1]^d coordinates and the
radius boundary is inclusive. Values follow the lower-is-better convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import math

import numpy as np

from .errors import DomainError, StateError


@dataclass(frozen=True)
class Trial:
    """One evaluated point: normalized location, raw objective, round index."""

    point: np.ndarray
    raw_value: float
    iteration: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        if not math.isfinite(self.raw_value):
            raise DomainError(f"trial value must be finite, got {self.raw_value}")
        if self.iteration < 0:
            raise DomainError("trial iteration must be non-negative")


class ObservationSet:
    """Ordered trial store; iteration indices are non-decreasing."""

    def __init__(self, trials: Iterable[Trial] = ()) -> None:
        self._trials: list[Trial] = []
        for t in trials:
            self.append(t)

    def append(self, trial: Trial) -> None:
        if self._trials and trial.iteration < self._trials[-1].iteration:
            raise DomainError(
                f"iteration {trial.iteration} precedes stored iteration "
                f"{self._trials[-1].iteration}"
            )
        self._trials.append(trial)

    def __len__(self) -> int:
        return len(self._trials)

    def __iter__(self) -> Iterator[Trial]:
        return iter(self._trials)

    def __getitem__(self, idx: int) -> Trial:
        return self._trials[idx]

    @property
    def trials(self) -> tuple[Trial, ...]:
        return tuple(self._trials)

    def points(self) -> np.ndarray:
        """All trial locations stacked as an (n, d) array."""
        return np.stack([t.point for t in self._trials])

    def values(self) -> np.ndarray:
        return np.array([t.raw_value for t in self._trials], dtype=float)


@dataclass(frozen=True)
class SmoothedSet:
    """Neighbor-smoothed view of an ObservationSet, same length and order."""

    points: np.ndarray
    values: np.ndarray


def neighbor_filter(center: np.ndarray, other: np.ndarray, radius: float) -> int:
    """1 if ``other`` lies within ``radius`` of ``center`` (inclusive), else 0."""
    center = np.asarray(center, dtype=float)
    other = np.asarray(other, dtype=float)
    if center.shape != other.shape:
        raise DomainError(f"point shapes differ: {center.shape} vs {other.shape}")
    if radius < 0:
        raise DomainError("radius must be >= 0")
    return int(np.linalg.norm(center - other) <= radius)


def _neighbor_mask(points: np.ndarray, queries: np.ndarray, radius: float) -> np.ndarray:
    """Boolean (n_queries, n_points) mask of inclusive radius membership."""
    diffs = queries[:, None, :] - points[None, :, :]
    return np.einsum("qpd,qpd->qp", diffs, diffs) <= radius * radius


def smooth(obs: ObservationSet, radius: float) -> SmoothedSet:
    """Replace each value by the mean of all values within ``radius`` of it.

    The trial's own observation is always in its neighborhood (distance 0),
    so the denominator is at least 1. With radius 0 and distinct points this
    is the identity on the raw values. Sums use exact (correctly rounded)
    accumulation so the result does not depend on summation order.
    """
    if len(obs) == 0:
        raise StateError("cannot smooth an empty observation set")
    if radius < 0:
        raise DomainError("radius must be >= 0")
    pts = obs.points()
    vals = obs.values()
    mask = _neighbor_mask(pts, pts, radius)
    sums = np.array([math.fsum(vals[row]) for row in mask])
    smoothed = sums / mask.sum(axis=1)
    return SmoothedSet(points=pts, values=smoothed)


def neighbor_count(obs: ObservationSet, query: np.ndarray, radius: float) -> int:
    """Number of stored trials within ``radius`` of ``query`` (inclusive)."""
    if radius < 0:
        raise DomainError("radius must be >= 0")
    if len(obs) == 0:
        return 0
    query = np.asarray(query, dtype=float)
    mask = _neighbor_mask(obs.points(), query[None, :], radius)
    return int(mask.sum())


def neighbor_counts(obs: ObservationSet, queries: np.ndarray, radius: float) -> np.ndarray:
    """Vectorized :func:`neighbor_count` over an (n, d) query batch."""
    if radius < 0:
        raise DomainError("radius must be >= 0")
    queries = np.asarray(queries, dtype=float)
    if len(obs) == 0:
        return np.zeros(len(queries), dtype=int)
    return _neighbor_mask(obs.points(), queries, radius).sum(axis=1)


def best_raw(obs: ObservationSet) -> Trial:
    """Trial with the minimum raw value; ties go to the earliest trial."""
    if len(obs) == 0:
        raise StateError("no trials observed yet")
    idx = int(np.argmin(obs.values()))
    return obs[idx]
