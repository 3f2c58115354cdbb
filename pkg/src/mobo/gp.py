"""Gaussian-process surrogates with a squared-exponential (ARD) kernel.

One independent GP per objective. Targets are z-scored at every fit so the
surrogates of differently-scaled objectives live on a common scale; the
posterior is reported in that normalized space and denormalization is an
explicit call. Hyperparameters are estimated by multi-start maximization of
the log marginal likelihood with analytic gradients.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize

logger = logging.getLogger(__name__)

__all__ = [
    "SeKernelParams",
    "GpModel",
    "Posterior",
    "se_kernel",
    "se_kernel_matrix",
    "fit",
    "predict",
    "posterior",
    "denormalize_mean",
    "log_marginal_likelihood",
    "refit_hyperparameters",
]

# Jitter ladder: factorization retries add noise in decade steps up to this cap.
MAX_JITTER = 1e-2
_JITTER_START = 1e-8


@dataclass(frozen=True)
class SeKernelParams:
    """Squared-exponential kernel hyperparameters (per-dimension lengthscales)."""

    signal_variance: float
    lengthscales: np.ndarray
    noise_variance: float = 0.0

    def __post_init__(self):
        ls = np.atleast_1d(np.asarray(self.lengthscales, dtype=float))
        if self.signal_variance <= 0 or np.any(ls <= 0) or self.noise_variance < 0:
            raise ValueError("signal_variance and lengthscales must be > 0, noise >= 0")
        object.__setattr__(self, "lengthscales", ls)


def se_kernel(a: np.ndarray, b: np.ndarray, p: SeKernelParams) -> float:
    """k(a, b) = signal_variance * exp(-0.5 * sum_j ((a_j - b_j) / l_j)^2)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("kernel inputs must share one shape")
    z = (a - b) / p.lengthscales
    return float(p.signal_variance * np.exp(-0.5 * np.dot(z, z)))


def se_kernel_matrix(x: np.ndarray, z: np.ndarray, p: SeKernelParams) -> np.ndarray:
    """Cross-covariance matrix of shape ``(len(x), len(z))``."""
    xs = np.atleast_2d(x) / p.lengthscales
    zs = np.atleast_2d(z) / p.lengthscales
    sq = (
        np.sum(xs**2, axis=1)[:, None]
        - 2.0 * xs @ zs.T
        + np.sum(zs**2, axis=1)[None, :]
    )
    return p.signal_variance * np.exp(-0.5 * np.maximum(sq, 0.0))


@dataclass(frozen=True)
class Posterior:
    """Predictive mean and standard deviation at one point (normalized space)."""

    mean: float
    stddev: float


@dataclass(frozen=True)
class GpModel:
    """Fitted GP: data, z-score normalizer, and cached Cholesky factor.

    ``chol`` is the lower factor of ``K + (noise + jitter) I``; ``alpha`` is
    the corresponding solve against the normalized targets. Immutable: refits
    produce new models.
    """

    kernel: SeKernelParams
    train_inputs: np.ndarray
    train_targets: np.ndarray
    normalizer: tuple[float, float]
    chol: np.ndarray
    alpha: np.ndarray
    jitter: float = 0.0

    @property
    def n(self) -> int:
        return self.train_inputs.shape[0]

    @property
    def dim(self) -> int:
        return self.train_inputs.shape[1]


def _factor(K: np.ndarray, noise: float) -> tuple[np.ndarray, float]:
    """Cholesky of ``K + noise I`` with a decade-step jitter ladder on failure."""
    n = K.shape[0]
    jitter = 0.0
    while True:
        try:
            L = cholesky(K + (noise + jitter) * np.eye(n), lower=True)
            return L, jitter
        except np.linalg.LinAlgError:
            pass
        jitter = _JITTER_START if jitter == 0.0 else jitter * 10.0
        if noise + jitter > MAX_JITTER:
            raise np.linalg.LinAlgError(
                f"kernel matrix not factorizable even with jitter {jitter:g}"
            )


def fit(inputs: np.ndarray, raw_targets: np.ndarray, params: SeKernelParams) -> GpModel:
    """Fit a GP to raw targets: z-score, factorize, cache the solve.

    Degenerate target spread (< 1e-12) falls back to unit scale so constant
    data stays queryable.
    """
    X = np.atleast_2d(np.asarray(inputs, dtype=float))
    y = np.asarray(raw_targets, dtype=float).ravel()
    if X.shape[0] < 1:
        raise ValueError("at least one training point is required")
    if X.shape[0] != y.size:
        raise ValueError("inputs and targets disagree in length")
    if not np.all(np.isfinite(y)):
        raise ValueError("targets must be finite")
    if params.lengthscales.size == 1 and X.shape[1] > 1:
        params = replace(params, lengthscales=np.full(X.shape[1], params.lengthscales[0]))

    mu = float(np.mean(y))
    sd = float(np.std(y))
    if sd < 1e-12:
        sd = 1.0
    t = (y - mu) / sd

    K = se_kernel_matrix(X, X, params)
    L, jitter = _factor(K, params.noise_variance)
    alpha = cho_solve((L, True), t)
    return GpModel(
        kernel=params,
        train_inputs=X,
        train_targets=t,
        normalizer=(mu, sd),
        chol=L,
        alpha=alpha,
        jitter=jitter,
    )


def predict(model: GpModel, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and stddev (normalized space) at query rows ``x``.

    Accepts ``(m, d)`` or a single ``(d,)`` point; returns ``(m,)`` arrays.
    """
    X = np.atleast_2d(np.asarray(x, dtype=float))
    ks = se_kernel_matrix(X, model.train_inputs, model.kernel)
    mean = ks @ model.alpha
    v = solve_triangular(model.chol, ks.T, lower=True)
    var = model.kernel.signal_variance - np.sum(v * v, axis=0)
    return mean, np.sqrt(np.maximum(var, 0.0))


def posterior(model: GpModel, x: np.ndarray) -> Posterior:
    """Single-point convenience wrapper around :func:`predict`."""
    mean, std = predict(model, x)
    return Posterior(mean=float(mean[0]), stddev=float(std[0]))


def denormalize_mean(model: GpModel, mean: np.ndarray | float) -> np.ndarray | float:
    """Map a normalized-space mean back to raw target units."""
    mu, sd = model.normalizer
    return mean * sd + mu


def log_marginal_likelihood(
    params: SeKernelParams,
    inputs: np.ndarray,
    targets: np.ndarray,
    with_gradient: bool = False,
):
    """Log marginal likelihood of z-scored ``targets``; optional gradient.

    The gradient is with respect to ``log signal_variance``, ``log l_1 ..
    log l_d``, ``log noise_variance`` (in that order).
    """
    X = np.atleast_2d(np.asarray(inputs, dtype=float))
    t = np.asarray(targets, dtype=float).ravel()
    n, d = X.shape
    Kf = se_kernel_matrix(X, X, params)
    L, jitter = _factor(Kf, params.noise_variance)
    alpha = cho_solve((L, True), t)
    lml = (
        -0.5 * float(t @ alpha)
        - float(np.sum(np.log(np.diag(L))))
        - 0.5 * n * np.log(2.0 * np.pi)
    )
    if not with_gradient:
        return lml

    Kinv = cho_solve((L, True), np.eye(n))
    W = np.outer(alpha, alpha) - Kinv  # dLML/dK = 0.5 * W
    grad = np.empty(d + 2)
    grad[0] = 0.5 * float(np.sum(W * Kf))  # d/dlog signal_variance
    Xs = X / params.lengthscales
    for j in range(d):
        D2 = (Xs[:, None, j] - Xs[None, :, j]) ** 2
        grad[1 + j] = 0.5 * float(np.sum(W * (Kf * D2)))
    grad[-1] = 0.5 * (params.noise_variance + jitter) * float(np.trace(W))
    return lml, grad


def refit_hyperparameters(
    model: GpModel,
    rng: np.random.Generator,
    lengthscale_span: np.ndarray | None = None,
    n_starts: int = 8,
    isotropic: bool = False,
) -> GpModel:
    """Re-estimate kernel hyperparameters by multi-start likelihood ascent.

    Search runs in log space under box bounds: lengthscales within
    ``[1e-3, 10] * span`` per dimension, signal variance in ``[1e-4, 1e4]``,
    noise variance in ``[1e-8, 1e-1]``. The incumbent parameters seed one
    start; the rest are log-uniform draws. Never returns a model whose
    likelihood is below the incumbent's; if every start fails the incumbent
    is kept and a warning is logged. ``isotropic=True`` ties all dimensions
    to a single lengthscale.
    """
    if model.n < 2:
        raise ValueError("hyperparameter estimation needs at least two points")
    X = model.train_inputs
    raw = model.train_targets * model.normalizer[1] + model.normalizer[0]
    d = model.dim
    span = np.asarray(
        lengthscale_span if lengthscale_span is not None else np.ptp(X, axis=0),
        dtype=float,
    )
    span = np.where(span > 1e-12, span, 1.0)
    n_ls = 1 if isotropic else d
    if isotropic:
        span = np.array([float(np.max(span))])

    lo = np.concatenate(([np.log(1e-4)], np.log(1e-3 * span), [np.log(1e-8)]))
    hi = np.concatenate(([np.log(1e4)], np.log(10.0 * span), [np.log(1e-1)]))
    bounds = list(zip(lo, hi))

    # likelihood is evaluated on the incumbent's normalized targets
    t = model.train_targets

    def expand(theta):
        ls = np.exp(theta[1 : 1 + n_ls])
        if isotropic:
            ls = np.full(d, ls[0])
        return SeKernelParams(
            signal_variance=float(np.exp(theta[0])),
            lengthscales=ls,
            noise_variance=float(np.exp(theta[-1])),
        )

    def objective(theta):
        try:
            lml, g = log_marginal_likelihood(expand(theta), X, t, with_gradient=True)
        except np.linalg.LinAlgError:
            return 1e25, np.zeros(n_ls + 2)
        if isotropic:
            g = np.array([g[0], np.sum(g[1 : 1 + d]), g[-1]])
        return -lml, -g

    incumbent_ls = model.kernel.lengthscales
    if isotropic:
        incumbent_ls = np.array([float(np.exp(np.mean(np.log(incumbent_ls))))])
    incumbent = np.concatenate(
        (
            [np.log(model.kernel.signal_variance)],
            np.log(incumbent_ls),
            [np.log(max(model.kernel.noise_variance, 1e-8))],
        )
    )
    starts = [np.clip(incumbent, lo, hi)]
    for _ in range(n_starts - 1):
        starts.append(rng.uniform(lo, hi))

    best_theta = None
    best_val = np.inf
    for theta0 in starts:
        try:
            res = minimize(
                objective,
                theta0,
                jac=True,
                method="L-BFGS-B",
                bounds=bounds,
                options={"maxiter": 200},
            )
        except Exception:  # noqa: BLE001 - any failed start is skipped
            continue
        if np.isfinite(res.fun) and res.fun < best_val:
            best_val = res.fun
            best_theta = res.x

    incumbent_lml = log_marginal_likelihood(model.kernel, X, t)
    if best_theta is None or -best_val < incumbent_lml:
        if best_theta is None:
            logger.warning("hyperparameter refit: all starts failed, keeping parameters")
        return fit(X, raw, model.kernel)

    return fit(X, raw, expand(best_theta))
