"""Ask/tell optimization engine and its ablation variants.

The engine owns the loop state: an initial batch of random points, then one
suggestion round per iteration in which the surrogate is refitted from
scratch on the current (optionally neighbor-smoothed) dataset and the next
point(s) are taken from the Pareto front of the acquisition ensemble.

Variants:

- ``random_search``  suggestions ignore all observations.
- ``plain_bo``       GP on raw values, EI-only argmax over the grid.
- ``ensemble_bo``    GP on raw values, full ensemble, no density reward.
- ``nrbo_no_density`` GP on smoothed values (scheduled radius), no reward.
- ``nrbo_static``    smoothing and reward at fixed radii (base+span / base).
- ``nrbo_full``      scheduled smoothing radius and scheduled reward radius.

Every random draw is keyed by (seed, purpose, round), so two engines with
the same config and the same told values produce identical suggestion
sequences, for every variant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import math

import numpy as np

from . import acquisition
from .dataset import ObservationSet, Trial, best_raw, smooth
from .errors import BudgetError, DomainError, ProtocolError, StateError
from .rng import rng_from, seed_key
from .schedule import ScheduleConfig, sigma1_at, sigma2_at
from .space import SearchSpace
from .surrogate import fit

VARIANTS = (
    "random_search",
    "plain_bo",
    "ensemble_bo",
    "nrbo_no_density",
    "nrbo_static",
    "nrbo_full",
)

_SMOOTHING_VARIANTS = ("nrbo_no_density", "nrbo_static", "nrbo_full")
_REWARD_VARIANTS = ("nrbo_static", "nrbo_full")

# Purpose tags for deterministic per-round RNG streams.
_TAG_INIT, _TAG_RANDOM, _TAG_FIT, _TAG_CANDIDATES, _TAG_SELECT = range(5)

#: Size of the seeded uniform candidate pool when the full grid would
#: exceed the configured cap.
CANDIDATE_POOL_SIZE = 4096

PHASE_INITIALIZING = "initializing"
PHASE_SUGGESTING = "suggesting"
PHASE_AWAITING = "awaiting_observation"
PHASE_FINISHED = "finished"


@dataclass(frozen=True)
class OptimizerConfig:
    """Everything a run needs; immutable so runs can share it."""

    space: SearchSpace
    budget: int
    init_count: int = 5
    batch_size: int = 1
    schedule: ScheduleConfig | None = None
    grid_points_per_dim: int = 30
    grid_cap: int = 100_000
    gp_restarts: int = 4
    kappa: float = 2.0
    rng_seed: int = 0
    variant: str = "nrbo_full"
    density_reward: bool = True

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        if self.budget < 1:
            raise DomainError("budget must be >= 1")
        if self.init_count < 1:
            raise DomainError("init_count must be >= 1")
        if not (1 <= self.batch_size <= self.budget):
            raise DomainError("batch_size must be in [1, budget]")
        if self.kappa <= 0:
            raise DomainError("kappa must be > 0")
        if self.schedule is None:
            object.__setattr__(self, "schedule", ScheduleConfig(total_iterations=self.budget))
        elif self.schedule.total_iterations != self.budget:
            raise DomainError(
                f"schedule covers {self.schedule.total_iterations} rounds "
                f"but budget is {self.budget}"
            )


class Optimizer:
    """Single-owner ask/tell state machine.

    ``iteration`` counts completed suggestion rounds (the initial random
    batch is round 0's prior context and does not advance it).
    """

    def __init__(self, config: OptimizerConfig) -> None:
        self.config = config
        self.phase = PHASE_INITIALIZING
        self.obs = ObservationSet()
        self.pending: list[np.ndarray] = []
        self.iteration = 0

    # -- helpers ---------------------------------------------------------

    def _derived_seed(self, tag: int, round_index: int) -> int:
        key = seed_key(self.config.rng_seed, tag, round_index)
        return int(key.generate_state(1)[0])

    def _candidates(self, round_index: int) -> np.ndarray:
        cfg = self.config
        try:
            return cfg.space.meshgrid(cfg.grid_points_per_dim, cap=cfg.grid_cap)
        except BudgetError:
            return cfg.space.sample_uniform(
                CANDIDATE_POOL_SIZE, self._derived_seed(_TAG_CANDIDATES, round_index)
            )

    def _fit_data(self, round_index: int) -> tuple[np.ndarray, np.ndarray]:
        """Training targets for the surrogate: raw or neighbor-smoothed."""
        cfg = self.config
        if cfg.variant not in _SMOOTHING_VARIANTS:
            return self.obs.points(), self.obs.values()
        if cfg.variant == "nrbo_static":
            radius = cfg.schedule.sigma1_base + cfg.schedule.sigma1_span
        else:
            radius = sigma1_at(cfg.schedule, round_index)
        smoothed = smooth(self.obs, radius)
        return smoothed.points, smoothed.values

    def _rewards(self, candidates: np.ndarray, round_index: int) -> np.ndarray:
        cfg = self.config
        if cfg.variant in _REWARD_VARIANTS and cfg.density_reward:
            if cfg.variant == "nrbo_static":
                radius = cfg.schedule.sigma2_base
            else:
                radius = sigma2_at(cfg.schedule, round_index)
            return acquisition.density_rewards(self.obs, candidates, radius)
        return np.ones(candidates.shape[0])

    def _suggest(self, round_index: int) -> list[np.ndarray]:
        cfg = self.config
        if cfg.variant == "random_search":
            pts = cfg.space.sample_uniform(
                cfg.batch_size, self._derived_seed(_TAG_RANDOM, round_index)
            )
            return [pts[i] for i in range(len(pts))]

        points, targets = self._fit_data(round_index)
        surrogate = fit(
            points,
            targets,
            restarts=cfg.gp_restarts,
            rng_seed=self._derived_seed(_TAG_FIT, round_index),
        )
        incumbent = float(np.min(targets))
        candidates = self._candidates(round_index)

        if cfg.variant == "plain_bo":
            means, variances = surrogate.predict_arrays(candidates)
            ei = acquisition.expected_improvement(means, variances, incumbent)
            # Stable descending order keeps grid tie-breaking reproducible.
            order = np.argsort(-ei, kind="stable")[: cfg.batch_size]
            return [candidates[i] for i in order]

        scores = acquisition.compute_scores(surrogate, candidates, incumbent, cfg.kappa)
        rewards = self._rewards(candidates, round_index)
        objectives = acquisition.ensemble_objectives(scores, rewards)
        chosen = acquisition.select_batch(
            objectives, cfg.batch_size, self._derived_seed(_TAG_SELECT, round_index)
        )
        return [candidates[i] for i in chosen]

    # -- protocol --------------------------------------------------------

    def ask(self) -> list[np.ndarray]:
        """Propose the next batch of normalized points."""
        if self.phase == PHASE_AWAITING:
            raise StateError("ask called twice without a tell")
        if self.phase == PHASE_FINISHED:
            raise StateError("budget exhausted; engine is finished")
        if self.phase == PHASE_INITIALIZING:
            pts = self.config.space.sample_uniform(
                self.config.init_count, self._derived_seed(_TAG_INIT, 0)
            )
            self.pending = [pts[i] for i in range(len(pts))]
        else:
            self.pending = self._suggest(self.iteration)
        self.phase = PHASE_AWAITING
        return list(self.pending)

    def tell(self, results: list[tuple[np.ndarray, float]]) -> None:
        """Report objective values for exactly the pending points, in order."""
        if self.phase != PHASE_AWAITING:
            raise StateError("tell called without a pending ask")
        if len(results) != len(self.pending):
            raise ProtocolError(
                f"expected {len(self.pending)} results, got {len(results)}"
            )
        for (point, value), expected in zip(results, self.pending):
            if not np.array_equal(np.asarray(point, dtype=float), expected):
                raise ProtocolError(
                    f"told point {np.asarray(point)} was not asked (expected {expected})"
                )
            if not math.isfinite(value):
                raise ValueError(f"objective value must be finite, got {value}")

        was_init = len(self.obs) == 0
        trial_iteration = 0 if was_init else self.iteration + 1
        for point, value in results:
            self.obs.append(
                Trial(point=np.asarray(point, dtype=float), raw_value=float(value),
                      iteration=trial_iteration)
            )
        self.pending = []
        if was_init:
            self.phase = PHASE_SUGGESTING
        else:
            self.iteration += 1
            self.phase = (
                PHASE_FINISHED if self.iteration >= self.config.budget else PHASE_SUGGESTING
            )

    def result(self) -> Trial:
        """Best trial so far by raw observed value (earliest on ties)."""
        return best_raw(self.obs)

    @property
    def finished(self) -> bool:
        return self.phase == PHASE_FINISHED
