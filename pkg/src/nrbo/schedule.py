"""Resource-conditioned radius schedules.

The smoothing radius shrinks linearly from base+span down to its base over
the run (strong regularization early, fine detail late), while the density
radius grows linearly from its base to base+span, which drives the density
reward toward zero everywhere so the search can converge.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class ScheduleConfig:
    """Linear schedule constants for the two radii over a run of N rounds."""

    total_iterations: int
    sigma1_base: float = 0.05
    sigma1_span: float = 0.10
    sigma2_base: float = 0.05
    sigma2_span: float = 0.15

    def __post_init__(self) -> None:
        if self.total_iterations < 1:
            raise DomainError("total_iterations must be >= 1")
        for field in ("sigma1_base", "sigma1_span", "sigma2_base", "sigma2_span"):
            if getattr(self, field) < 0:
                raise DomainError(f"{field} must be >= 0")


@dataclass(frozen=True)
class ScheduleState:
    """Snapshot of the radii in effect at one round."""

    iteration: int
    sigma1_now: float
    sigma2_now: float


def _check_iteration(cfg: ScheduleConfig, i: int) -> None:
    if not (0 <= i <= cfg.total_iterations):
        raise DomainError(
            f"iteration {i} outside [0, {cfg.total_iterations}]"
        )


def sigma1_at(cfg: ScheduleConfig, i: int) -> float:
    """Smoothing radius at round i: base + (1 - i/N) * span, non-increasing."""
    _check_iteration(cfg, i)
    return cfg.sigma1_base + (1.0 - i / cfg.total_iterations) * cfg.sigma1_span


def sigma2_at(cfg: ScheduleConfig, i: int) -> float:
    """Density radius at round i: base + (i/N) * span, non-decreasing."""
    _check_iteration(cfg, i)
    return cfg.sigma2_base + (i / cfg.total_iterations) * cfg.sigma2_span


def state_at(cfg: ScheduleConfig, i: int) -> ScheduleState:
    return ScheduleState(iteration=i, sigma1_now=sigma1_at(cfg, i), sigma2_now=sigma2_at(cfg, i))
