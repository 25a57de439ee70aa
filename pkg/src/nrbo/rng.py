"""Deterministic RNG derivation.

Every stochastic step in the package draws from a generator keyed by a
tuple of integers (base seed, purpose tag, iteration, ...) so that runs
are exactly replayable and resumable.
"""

from __future__ import annotations

import numpy as np

_MASK = 0xFFFFFFFF


def seed_key(*parts: int) -> np.random.SeedSequence:
    """Build a SeedSequence from integer key parts (negatives are masked)."""
    return np.random.SeedSequence([int(p) & _MASK for p in parts])


def rng_from(*parts: int) -> np.random.Generator:
    """Generator for the stream identified by the given key parts."""
    return np.random.default_rng(seed_key(*parts))
