"""Synthetic noisy objectives, robustness experiment, run matrices, metrics.

Objectives are minimized and evaluated in normalized [0,1]^d coordinates.
Noise draws are a deterministic function of (objective seed, trial index),
so optimizer variants compared under the same seed see identical noise and
differ only in where they chose to sample.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

import numpy as np

from .dataset import ObservationSet, Trial, smooth
from .engine import PHASE_INITIALIZING, Optimizer, OptimizerConfig
from .errors import DomainError, NrboError
from .rng import rng_from
from .schedule import sigma1_at, sigma2_at
from .space import unit_space
from .surrogate import fit


@dataclass(frozen=True)
class SyntheticObjective:
    """Noisy test function with a known optimum, in minimization convention."""

    name: str
    dimension: int
    noise_level: float
    true_optimum: float
    rng_seed: int
    argmin: tuple[float, ...]
    fn: Callable[[np.ndarray], float]


def _sincos2d(p: np.ndarray) -> float:
    # Negated so the peak of the sin/cos landscape becomes the minimum.
    return float(-(math.sin(2.0 * math.pi * p[0]) + math.cos(2.0 * math.pi * p[1])))


_BRANIN_B = 5.1 / (4.0 * math.pi**2)
_BRANIN_C = 5.0 / math.pi
_BRANIN_T = 1.0 / (8.0 * math.pi)


def _branin(p: np.ndarray) -> float:
    x1 = 15.0 * p[0] - 5.0
    x2 = 15.0 * p[1]
    return float(
        (x2 - _BRANIN_B * x1**2 + _BRANIN_C * x1 - 6.0) ** 2
        + 10.0 * (1.0 - _BRANIN_T) * math.cos(x1)
        + 10.0
    )


def _sphere(p: np.ndarray) -> float:
    return float(np.sum((p - 0.5) ** 2))


_BUILTINS: dict[str, dict] = {
    "sincos2d": dict(fn=_sincos2d, dimension=2, true_optimum=-2.0, argmin=(0.25, 0.0)),
    "branin": dict(
        fn=_branin,
        dimension=2,
        true_optimum=10.0 / (8.0 * math.pi),
        argmin=((5.0 - math.pi) / 15.0, 12.275 / 15.0),
    ),
    "sphere": dict(fn=_sphere, dimension=2, true_optimum=0.0, argmin=(0.5, 0.5)),
}


def builtin_names() -> tuple[str, ...]:
    return tuple(sorted(_BUILTINS))


def make_objective(
    name: str, noise_level: float = 0.0, rng_seed: int = 0
) -> SyntheticObjective:
    """Instantiate a builtin objective at a noise level."""
    if name not in _BUILTINS:
        raise DomainError(f"unknown objective {name!r}; builtins: {builtin_names()}")
    if noise_level < 0:
        raise DomainError("noise_level must be >= 0")
    spec = _BUILTINS[name]
    return SyntheticObjective(
        name=name,
        dimension=spec["dimension"],
        noise_level=noise_level,
        true_optimum=spec["true_optimum"],
        rng_seed=rng_seed,
        argmin=spec["argmin"],
        fn=spec["fn"],
    )


def eval_objective(obj: SyntheticObjective, point: np.ndarray, draw_seed: int) -> float:
    """Noiseless value plus noise_level times a seeded standard-normal draw."""
    point = np.asarray(point, dtype=float)
    if point.shape != (obj.dimension,):
        raise DomainError(
            f"objective {obj.name} is {obj.dimension}-dimensional, got shape {point.shape}"
        )
    value = obj.fn(point)
    if obj.noise_level > 0.0:
        value += obj.noise_level * float(rng_from(obj.rng_seed, draw_seed).standard_normal())
    return value


def surrogate_robustness(
    noise_level: float,
    n_train: int = 60,
    radius: float = 0.1,
    seed: int = 0,
    eval_points_per_dim: int = 50,
    gp_restarts: int = 4,
) -> tuple[float, float]:
    """RMSE of plain vs neighbor-smoothed GP fits against the noiseless truth.

    Samples the noisy sin/cos landscape, fits one GP on the raw targets and
    one on the radius-smoothed targets, and scores both posterior means on a
    dense grid against the analytic noiseless surface.
    """
    if n_train < 10:
        raise DomainError("n_train must be >= 10")
    obj = make_objective("sincos2d", noise_level=noise_level, rng_seed=seed)
    space = unit_space(2)
    x = space.sample_uniform(n_train, seed)
    y = np.array([eval_objective(obj, x[i], i) for i in range(n_train)])

    obs = ObservationSet(Trial(point=x[i], raw_value=float(y[i]), iteration=0) for i in range(n_train))
    smoothed = smooth(obs, radius)

    gp_plain = fit(x, y, restarts=gp_restarts, rng_seed=seed)
    gp_reg = fit(smoothed.points, smoothed.values, restarts=gp_restarts, rng_seed=seed)

    grid = space.meshgrid(eval_points_per_dim)
    truth = np.array([obj.fn(g) for g in grid])
    mean_plain, _ = gp_plain.predict_arrays(grid)
    mean_reg, _ = gp_reg.predict_arrays(grid)
    rmse_plain = float(np.sqrt(np.mean((mean_plain - truth) ** 2)))
    rmse_reg = float(np.sqrt(np.mean((mean_reg - truth) ** 2)))
    return rmse_plain, rmse_reg


@dataclass(frozen=True)
class TrajectoryPoint:
    """One trial as recorded in a run trajectory."""

    iteration: int
    point: tuple[float, ...]
    raw_value: float
    best_so_far: float
    sigma1: float
    sigma2: float


@dataclass
class RunRecord:
    """Full trajectory of one optimization run."""

    objective: str
    noise_level: float
    variant: str
    seed: int
    rows: list[TrajectoryPoint] = field(default_factory=list)
    wall_time: float = 0.0
    error: str | None = None

    @property
    def final_best(self) -> float:
        if not self.rows:
            return math.nan
        return self.rows[-1].best_so_far


def run_single(objective: SyntheticObjective, config: OptimizerConfig) -> RunRecord:
    """Drive one engine to its budget against a synthetic objective."""
    record = RunRecord(
        objective=objective.name,
        noise_level=objective.noise_level,
        variant=config.variant,
        seed=config.rng_seed,
    )
    start = time.perf_counter()
    engine = Optimizer(config)
    trial_index = 0
    best = math.inf
    try:
        while not engine.finished:
            round_index = 0 if engine.phase == PHASE_INITIALIZING else engine.iteration
            points = engine.ask()
            s1 = sigma1_at(config.schedule, round_index)
            s2 = sigma2_at(config.schedule, round_index)
            results = []
            for p in points:
                value = eval_objective(objective, p, trial_index)
                trial_index += 1
                results.append((p, value))
            engine.tell(results)
            for p, value in results:
                best = min(best, value)
                record.rows.append(
                    TrajectoryPoint(
                        iteration=engine.obs[-1].iteration,
                        point=tuple(float(c) for c in p),
                        raw_value=value,
                        best_so_far=best,
                        sigma1=s1,
                        sigma2=s2,
                    )
                )
    except NrboError as err:
        record.error = f"{type(err).__name__}: {err}"
    record.wall_time = time.perf_counter() - start
    return record


def _run_task(task: tuple[SyntheticObjective, OptimizerConfig]) -> RunRecord:
    return run_single(*task)


def run_matrix(
    objectives: Sequence[SyntheticObjective],
    variants: Sequence[str],
    seeds: Sequence[int],
    base_config: OptimizerConfig,
    jobs: int = 1,
) -> list[RunRecord]:
    """One run per (objective, variant, seed), in that deterministic order.

    Each run gets its own noise stream (objective reseeded with the run
    seed); failures are recorded on the RunRecord and do not stop the rest
    of the matrix.
    """
    if not objectives or not variants or not seeds:
        raise DomainError("objectives, variants and seeds must be non-empty")
    tasks = []
    for obj in objectives:
        for variant in variants:
            for seed in seeds:
                cfg = replace(
                    base_config,
                    space=unit_space(obj.dimension),
                    variant=variant,
                    rng_seed=seed,
                )
                tasks.append((replace(obj, rng_seed=seed), cfg))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_task, tasks))
    return [_run_task(t) for t in tasks]


@dataclass(frozen=True)
class ScoreSummary:
    """Aggregate over the runs of one (objective, variant) cell."""

    mean_best: float
    normalized_mean_score: float
    runs: int
    seeds: tuple[int, ...]


def normalized_mean_score(
    records: Sequence[RunRecord],
    baseline_records: Sequence[RunRecord],
    true_optimum: float,
) -> float:
    """Mean optimality gap divided by the baseline's mean gap.

    1.0 means parity with the baseline (random search), 0.0 means every run
    ended exactly at the optimum; lower is better.
    """
    if not records or not baseline_records:
        raise DomainError("need at least one record on each side")
    gaps = np.array([r.final_best - true_optimum for r in records])
    baseline_gap = float(np.mean([r.final_best - true_optimum for r in baseline_records]))
    if baseline_gap == 0.0:
        raise DomainError("baseline mean gap is zero; normalized score undefined")
    return float(np.mean(gaps) / baseline_gap)


def summarize(
    records: Sequence[RunRecord],
    baseline_records: Sequence[RunRecord],
    true_optimum: float,
) -> ScoreSummary:
    ok = [r for r in records if r.error is None]
    return ScoreSummary(
        mean_best=float(np.mean([r.final_best for r in ok])),
        normalized_mean_score=normalized_mean_score(
            ok, [r for r in baseline_records if r.error is None], true_optimum
        ),
        runs=len(ok),
        seeds=tuple(r.seed for r in ok),
    )
