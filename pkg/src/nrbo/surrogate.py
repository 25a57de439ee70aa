"""Gaussian-process regression surrogate.

Matérn-5/2 covariance with per-dimension (ARD) lengthscales, exact posterior
prediction through a cached Cholesky factor, and hyperparameter fitting by
multi-start projected gradient descent on the negative log marginal
likelihood (NLML) over log-parameters.

Targets are standardized to zero mean / unit variance before fitting. The
observation-noise variance is learned, but floored at a small fraction of
the signal variance and capped low, so the posterior stays close to
interpolation: denoising is the job of the neighbor smoothing applied to
the targets upstream, not of a large global noise term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular

from .errors import DomainError, NumericalError
from .rng import rng_from

_SQRT5 = math.sqrt(5.0)

#: Effective noise is never below this fraction of the signal variance.
NOISE_FLOOR_FRAC = 1e-6

# Box bounds for the log-parameters optimized by fit().
LOG_LENGTHSCALE_BOUNDS = (math.log(0.01), math.log(10.0))
LOG_SIGNAL_VARIANCE_BOUNDS = (math.log(1e-3), math.log(1e3))
LOG_NOISE_BOUNDS = (math.log(1e-8), math.log(1e-2))


@dataclass(frozen=True)
class KernelParams:
    """Matérn-5/2 hyperparameters; noise enters only on the Gram diagonal."""

    signal_variance: float
    lengthscales: np.ndarray
    noise_variance: float

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "lengthscales", np.asarray(self.lengthscales, dtype=float)
        )
        if self.signal_variance <= 0:
            raise DomainError("signal_variance must be > 0")
        if np.any(self.lengthscales <= 0):
            raise DomainError("lengthscales must be > 0")
        if self.noise_variance < 0:
            raise DomainError("noise_variance must be >= 0")


@dataclass(frozen=True)
class Prediction:
    """Posterior mean/variance at one query, in raw objective units."""

    mean: float
    variance: float


def _matern52(sq: np.ndarray) -> np.ndarray:
    """Matérn-5/2 profile as a function of squared scaled distance."""
    r = np.sqrt(sq)
    return (1.0 + _SQRT5 * r + (5.0 / 3.0) * sq) * np.exp(-_SQRT5 * r)


def kernel(a: np.ndarray, b: np.ndarray, params: KernelParams) -> float:
    """Covariance between two points (noise excluded); kernel(a, a) = signal variance."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DomainError(f"point shapes differ: {a.shape} vs {b.shape}")
    sq = float(np.sum(((a - b) / params.lengthscales) ** 2))
    return params.signal_variance * float(_matern52(np.array(sq)))


def kernel_matrix(a: np.ndarray, b: np.ndarray, params: KernelParams) -> np.ndarray:
    """Cross-covariance matrix between point batches, noise excluded."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    diff = (a[:, None, :] - b[None, :, :]) / params.lengthscales
    sq = np.einsum("nmd,nmd->nm", diff, diff)
    return params.signal_variance * _matern52(sq)


def _theta_bounds(dim: int) -> tuple[np.ndarray, np.ndarray]:
    lower = np.array(
        [LOG_SIGNAL_VARIANCE_BOUNDS[0]]
        + [LOG_LENGTHSCALE_BOUNDS[0]] * dim
        + [LOG_NOISE_BOUNDS[0]]
    )
    upper = np.array(
        [LOG_SIGNAL_VARIANCE_BOUNDS[1]]
        + [LOG_LENGTHSCALE_BOUNDS[1]] * dim
        + [LOG_NOISE_BOUNDS[1]]
    )
    return lower, upper


class _NlmlObjective:
    """NLML and its gradient over theta = [log sv, log ls_1..d, log noise].

    The per-dimension squared coordinate differences are precomputed once,
    so each evaluation costs one Cholesky plus O(d) Hadamard products.
    """

    def __init__(self, points: np.ndarray, targets: np.ndarray) -> None:
        self.x = points
        self.y = targets
        self.n, self.dim = points.shape
        d = points[:, None, :] - points[None, :, :]
        self.sq_diffs = np.moveaxis(d * d, -1, 0)  # (dim, n, n)

    def __call__(self, theta: np.ndarray) -> tuple[float, np.ndarray]:
        sv = math.exp(theta[0])
        inv_ls_sq = np.exp(-2.0 * theta[1 : 1 + self.dim])
        noise = math.exp(theta[-1])
        eff_noise = noise + NOISE_FLOOR_FRAC * sv

        sq = np.einsum("i,ijk->jk", inv_ls_sq, self.sq_diffs)
        r = np.sqrt(sq)
        decay = np.exp(-_SQRT5 * r)
        profile = (1.0 + _SQRT5 * r + (5.0 / 3.0) * sq) * decay
        gram = sv * profile
        gram[np.diag_indices(self.n)] += eff_noise

        try:
            chol_l = cholesky(gram, lower=True)
        except np.linalg.LinAlgError:
            return math.inf, np.zeros_like(theta)

        alpha = cho_solve((chol_l, True), self.y)
        nlml = (
            0.5 * float(self.y @ alpha)
            + float(np.log(np.diag(chol_l)).sum())
            + 0.5 * self.n * math.log(2.0 * math.pi)
        )

        kinv = cho_solve((chol_l, True), np.eye(self.n))
        w = np.outer(alpha, alpha) - kinv

        grad = np.empty_like(theta)
        # d(gram)/d(log sv) scales both the signal term and the noise floor.
        grad[0] = -0.5 * (sv * float(np.sum(w * profile)) + NOISE_FLOOR_FRAC * sv * float(np.trace(w)))
        ls_common = sv * (5.0 / 3.0) * (1.0 + _SQRT5 * r) * decay
        for i in range(self.dim):
            dk = ls_common * (self.sq_diffs[i] * inv_ls_sq[i])
            grad[1 + i] = -0.5 * float(np.sum(w * dk))
        grad[-1] = -0.5 * noise * float(np.trace(w))
        return nlml, grad


def nlml_and_grad(
    points: np.ndarray, targets: np.ndarray, theta: np.ndarray
) -> tuple[float, np.ndarray]:
    """Training objective for already-standardized targets; see _NlmlObjective."""
    x = np.atleast_2d(np.asarray(points, dtype=float))
    y = np.asarray(targets, dtype=float)
    return _NlmlObjective(x, y)(np.asarray(theta, dtype=float))


def _descend(
    objective: _NlmlObjective,
    theta0: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    max_iter: int = 150,
    grad_tol: float = 1e-5,
) -> tuple[np.ndarray, float, list[float]]:
    """Projected gradient descent with backtracking; history is monotone."""
    theta = np.clip(theta0, lower, upper)
    fval, grad = objective(theta)
    history = [fval]
    step = 0.25
    for _ in range(max_iter):
        if not math.isfinite(fval) or np.max(np.abs(grad)) < grad_tol:
            break
        accepted = False
        while step >= 1e-12:
            cand = np.clip(theta - step * grad, lower, upper)
            f_cand, g_cand = objective(cand)
            if f_cand < fval - 1e-12 * (1.0 + abs(fval)):
                theta, fval, grad = cand, f_cand, g_cand
                history.append(fval)
                step = min(step * 1.5, 5.0)
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
    return theta, fval, history


@dataclass(frozen=True)
class Surrogate:
    """Fitted GP: kernel parameters plus the factored training covariance.

    ``train_targets`` are standardized; predictions are mapped back to raw
    units. Instances are immutable, so predict calls are safe concurrently.
    """

    params: KernelParams
    train_points: np.ndarray
    train_targets: np.ndarray
    target_mean: float
    target_std: float
    chol_factor: np.ndarray
    alpha: np.ndarray
    nlml_value: float = math.nan

    def predict(self, query: np.ndarray) -> Prediction:
        """Posterior mean/variance at one point, destandardized."""
        means, variances = self.predict_arrays(np.asarray(query, dtype=float)[None, :])
        return Prediction(mean=float(means[0]), variance=float(variances[0]))

    def predict_arrays(self, queries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized posterior over an (n, d) batch; reuses the stored factor."""
        queries = np.atleast_2d(np.asarray(queries, dtype=float))
        if queries.shape[0] == 0:
            return np.zeros(0), np.zeros(0)
        cross = kernel_matrix(self.train_points, queries, self.params)  # (n, q)
        mean_std = cross.T @ self.alpha
        v = solve_triangular(self.chol_factor, cross, lower=True)
        var_std = self.params.signal_variance - np.einsum("nq,nq->q", v, v)
        np.clip(var_std, 0.0, None, out=var_std)
        means = self.target_mean + self.target_std * mean_std
        variances = (self.target_std**2) * var_std
        return means, variances

    def predict_batch(self, queries: np.ndarray) -> list[Prediction]:
        """Elementwise predict() over a batch (empty batch gives []).

        Exactly equal to calling predict per point; the stored factorization
        is reused. The vectorized predict_arrays is the fast path for large
        candidate sets and agrees with predict to floating-point round-off.
        """
        queries = np.atleast_2d(np.asarray(queries, dtype=float))
        if queries.size == 0:
            return []
        return [self.predict(q) for q in queries]


def build_surrogate(
    points: np.ndarray,
    targets: np.ndarray,
    params: KernelParams,
    standardize: bool = True,
    nlml_value: float = math.nan,
) -> Surrogate:
    """Assemble a Surrogate for explicit kernel parameters.

    Escalates a diagonal ridge (folded into the stored noise) only if the
    plain Cholesky factorization fails; raises NumericalError when even the
    largest ridge cannot repair conditioning.
    """
    x = np.atleast_2d(np.asarray(points, dtype=float))
    t = np.asarray(targets, dtype=float)
    if standardize:
        mean = float(t.mean())
        std = float(t.std())
        if std < 1e-12:
            std = 1.0
    else:
        mean, std = 0.0, 1.0
    y = (t - mean) / std

    gram = kernel_matrix(x, x, params)
    scale = float(np.mean(np.diag(gram))) + params.noise_variance
    ridge_used = 0.0
    last_err: Exception | None = None
    for ridge_frac in (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4):
        ridge_used = scale * ridge_frac
        k = gram.copy()
        k[np.diag_indices(len(x))] += params.noise_variance + ridge_used
        try:
            chol_l = cholesky(k, lower=True)
            break
        except np.linalg.LinAlgError as err:
            last_err = err
    else:
        raise NumericalError(
            f"Cholesky failed after jitter escalation up to {ridge_used:.3g} "
            f"(n={len(x)}, signal_variance={params.signal_variance:.3g})"
        ) from last_err
    if ridge_used > 0.0:
        params = replace(params, noise_variance=params.noise_variance + ridge_used)

    alpha = cho_solve((chol_l, True), y)
    return Surrogate(
        params=params,
        train_points=x,
        train_targets=y,
        target_mean=mean,
        target_std=std,
        chol_factor=chol_l,
        alpha=alpha,
        nlml_value=nlml_value,
    )


def fit(
    points: np.ndarray,
    targets: np.ndarray,
    restarts: int = 4,
    rng_seed: int = 0,
) -> Surrogate:
    """Fit kernel hyperparameters by multi-start NLML minimization.

    Deterministic for a given seed: restart initializations are drawn from a
    seeded stream and the restart with the lowest NLML wins (ties by restart
    index).
    """
    x = np.atleast_2d(np.asarray(points, dtype=float))
    t = np.asarray(targets, dtype=float)
    if x.shape[0] < 2:
        raise DomainError("fit needs at least 2 points")
    if x.shape[0] != t.shape[0]:
        raise DomainError(f"{x.shape[0]} points but {t.shape[0]} targets")
    if not np.all(np.isfinite(t)):
        raise DomainError("targets must be finite")
    if restarts < 1:
        raise DomainError("restarts must be >= 1")

    mean = float(t.mean())
    std = float(t.std())
    if std < 1e-12:
        std = 1.0
    y = (t - mean) / std

    dim = x.shape[1]
    objective = _NlmlObjective(x, y)
    lower, upper = _theta_bounds(dim)

    starts = [np.array([0.0] + [math.log(0.5)] * dim + [math.log(1e-4)])]
    rng = rng_from(rng_seed)
    for _ in range(restarts - 1):
        log_sv = rng.uniform(math.log(0.1), math.log(10.0))
        log_ls = rng.uniform(math.log(0.05), math.log(2.0), size=dim)
        log_noise = rng.uniform(math.log(1e-6), math.log(1e-3))
        starts.append(np.concatenate(([log_sv], log_ls, [log_noise])))

    best_theta: np.ndarray | None = None
    best_f = math.inf
    for theta0 in starts:
        theta, fval, _ = _descend(objective, theta0, lower, upper)
        if fval < best_f:
            best_theta, best_f = theta, fval
    if best_theta is None or not math.isfinite(best_f):
        raise NumericalError("every NLML restart failed to factorize")

    sv = math.exp(best_theta[0])
    lengthscales = np.exp(best_theta[1 : 1 + dim])
    noise = math.exp(best_theta[-1]) + NOISE_FLOOR_FRAC * sv
    params = KernelParams(
        signal_variance=sv, lengthscales=lengthscales, noise_variance=noise
    )
    surrogate = build_surrogate(x, t, params, standardize=True, nlml_value=best_f)
    return surrogate
