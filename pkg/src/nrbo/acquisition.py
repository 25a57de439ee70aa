"""Density-adjusted multi-objective acquisition ensemble.

Expected improvement, probability of improvement and a lower confidence
bound are scored over the whole candidate set; each score is then granted a
per-candidate bonus proportional to the ensemble-wide score spread times a
density reward exp(-neighbor count), which is largest in regions with no
observed samples. The next point is drawn uniformly from the exact Pareto
front of the three adjusted objectives (all minimized).
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np
from scipy.special import ndtr

from .dataset import ObservationSet, neighbor_counts
from .errors import DomainError
from .rng import rng_from
from .surrogate import Surrogate

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _std_normal_pdf(z: np.ndarray) -> np.ndarray:
    return _INV_SQRT_2PI * np.exp(-0.5 * z * z)


def expected_improvement(mean, variance, incumbent):
    """Closed-form EI under minimization (improvement = incumbent - value).

    Accepts scalars or arrays; zero variance degenerates to
    max(incumbent - mean, 0).
    """
    mean = np.asarray(mean, dtype=float)
    std = np.sqrt(np.asarray(variance, dtype=float))
    imp = incumbent - mean
    positive = std > 0.0
    z = np.divide(imp, std, out=np.zeros_like(std), where=positive)
    ei = np.where(positive, imp * ndtr(z) + std * _std_normal_pdf(z), np.maximum(imp, 0.0))
    return np.maximum(ei, 0.0)[()]


def probability_improvement(mean, variance, incumbent):
    """P(value < incumbent); zero variance degenerates to an indicator."""
    mean = np.asarray(mean, dtype=float)
    std = np.sqrt(np.asarray(variance, dtype=float))
    imp = incumbent - mean
    positive = std > 0.0
    z = np.divide(imp, std, out=np.zeros_like(std), where=positive)
    return np.where(positive, ndtr(z), (imp > 0.0).astype(float))[()]


def lower_confidence_bound(mean, variance, kappa: float):
    """mean - kappa * std; the optimistic bound minimized by the ensemble."""
    if kappa <= 0:
        raise DomainError("kappa must be > 0")
    mean = np.asarray(mean, dtype=float)
    std = np.sqrt(np.asarray(variance, dtype=float))
    return (mean - kappa * std)[()]


@dataclass(frozen=True)
class AcqScores:
    """Raw ensemble scores per candidate plus their population spreads."""

    ei: np.ndarray
    pi: np.ndarray
    ucb: np.ndarray
    s_ei: float
    s_pi: float
    s_ucb: float


def compute_scores(
    surrogate: Surrogate, candidates: np.ndarray, incumbent: float, kappa: float
) -> AcqScores:
    """Evaluate the three acquisitions over the candidate batch."""
    means, variances = surrogate.predict_arrays(candidates)
    ei = expected_improvement(means, variances, incumbent)
    pi = probability_improvement(means, variances, incumbent)
    ucb = lower_confidence_bound(means, variances, kappa)
    return AcqScores(
        ei=ei,
        pi=pi,
        ucb=ucb,
        s_ei=float(np.std(ei)),
        s_pi=float(np.std(pi)),
        s_ucb=float(np.std(ucb)),
    )


def density_rewards(
    obs: ObservationSet, candidates: np.ndarray, sigma2: float
) -> np.ndarray:
    """exp(-count of observed samples within sigma2) per candidate, in (0, 1]."""
    counts = neighbor_counts(obs, candidates, sigma2)
    return np.exp(-counts.astype(float))


def ensemble_objectives(scores: AcqScores, rewards: np.ndarray) -> np.ndarray:
    """Stack the three minimized objectives as columns of an (n, 3) array.

    Each objective is the negated (or, for the confidence bound, direct)
    score minus the reward-scaled spread of that score over the candidates.
    """
    return np.column_stack(
        (
            -scores.ei - rewards * scores.s_ei,
            -scores.pi - rewards * scores.s_pi,
            scores.ucb - rewards * scores.s_ucb,
        )
    )


def score_candidates(
    surrogate: Surrogate,
    obs: ObservationSet,
    candidates: np.ndarray,
    sigma2: float,
    kappa: float,
    incumbent: float,
    with_density: bool = True,
) -> np.ndarray:
    """Adjusted ensemble objectives for every candidate; all minimized.

    With the density reward disabled the reward factor is identically 1,
    which shifts each objective uniformly and leaves every argmin unchanged.
    """
    candidates = np.atleast_2d(np.asarray(candidates, dtype=float))
    if candidates.shape[0] == 0:
        raise DomainError("candidate set must be non-empty")
    scores = compute_scores(surrogate, candidates, incumbent, kappa)
    if with_density:
        rewards = density_rewards(obs, candidates, sigma2)
    else:
        rewards = np.ones(candidates.shape[0])
    return ensemble_objectives(scores, rewards)


def pareto_front_mask(objectives: np.ndarray) -> np.ndarray:
    """Boolean mask of non-dominated rows under componentwise minimization.

    A row is dominated when some other row is <= in every column and < in at
    least one; exact duplicates of a front member are therefore kept.
    """
    costs = np.asarray(objectives, dtype=float)
    n = costs.shape[0]
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        if not keep[i]:
            continue
        # Drop everything the candidate set can no longer defend: rows with
        # no strictly better coordinate than row i are dominated by or equal
        # to it. Duplicates are restored below.
        better_somewhere = np.any(costs[keep] < costs[i], axis=1)
        kept_idx = np.flatnonzero(keep)
        keep[kept_idx] = better_somewhere
        keep[i] = True
    mask = np.zeros(n, dtype=bool)
    for i in np.flatnonzero(keep):
        mask |= np.all(costs == costs[i], axis=1)
    return mask


def select_next(objectives: np.ndarray, rng_seed: int) -> int:
    """Index of a uniformly drawn Pareto-optimal candidate (seeded)."""
    objectives = np.atleast_2d(np.asarray(objectives, dtype=float))
    if objectives.shape[0] == 0:
        raise DomainError("objectives must be non-empty")
    front = np.flatnonzero(pareto_front_mask(objectives))
    return int(rng_from(rng_seed).choice(front))


def select_batch(objectives: np.ndarray, batch: int, rng_seed: int) -> list[int]:
    """Batch selection without replacement from successive Pareto layers.

    Takes as much of the first front as possible; if the front is smaller
    than the batch the remaining slots are filled from the next
    non-dominated layer, and so on.
    """
    objectives = np.atleast_2d(np.asarray(objectives, dtype=float))
    if batch < 1:
        raise DomainError("batch must be >= 1")
    if batch > objectives.shape[0]:
        raise DomainError("batch larger than candidate set")
    rng = rng_from(rng_seed)
    remaining = np.arange(objectives.shape[0])
    chosen: list[int] = []
    while len(chosen) < batch:
        layer = remaining[pareto_front_mask(objectives[remaining])]
        need = batch - len(chosen)
        if len(layer) > need:
            picked = rng.choice(layer, size=need, replace=False)
            chosen.extend(int(i) for i in picked)
        else:
            order = rng.permutation(len(layer))
            chosen.extend(int(i) for i in layer[order])
            remaining = np.setdiff1d(remaining, layer)
    return chosen
