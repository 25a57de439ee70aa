"""Neighbor-regularized Bayesian optimization.

A black-box minimizer that smooths each observation with its in-radius
neighbors before fitting the Gaussian-process surrogate, rewards sampling
in sparsely observed regions through the acquisition ensemble, and adapts
both radii to the remaining budget. Includes a synthetic benchmark harness
and a CLI (``nrbo``).
"""

from .dataset import ObservationSet, SmoothedSet, Trial, best_raw, neighbor_count, neighbor_filter, smooth
from .engine import VARIANTS, Optimizer, OptimizerConfig
from .errors import (
    BudgetError,
    ConfigError,
    DomainError,
    NrboError,
    NumericalError,
    ProtocolError,
    StateError,
)
from .schedule import ScheduleConfig, ScheduleState, sigma1_at, sigma2_at
from .space import Dimension, SearchSpace, unit_space
from .surrogate import KernelParams, Prediction, Surrogate, build_surrogate, fit

__all__ = [
    "BudgetError",
    "ConfigError",
    "Dimension",
    "DomainError",
    "KernelParams",
    "NrboError",
    "NumericalError",
    "ObservationSet",
    "Optimizer",
    "OptimizerConfig",
    "Prediction",
    "ProtocolError",
    "ScheduleConfig",
    "ScheduleState",
    "SearchSpace",
    "SmoothedSet",
    "StateError",
    "Surrogate",
    "Trial",
    "VARIANTS",
    "best_raw",
    "build_surrogate",
    "fit",
    "neighbor_count",
    "neighbor_filter",
    "sigma1_at",
    "sigma2_at",
    "smooth",
    "unit_space",
]

__version__ = "0.1.0"
