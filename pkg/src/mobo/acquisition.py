"""Single-objective acquisition functions and confidence-width schedule.

All four acquisitions consume the GP posterior in normalized target space:

* ``ucb`` / ``lcb``: mean +/- sqrt(beta) * stddev,
* ``ei``: expected improvement below the best observed value,
* Thompson sampling via :class:`SamplePath`, a spectral (random-feature)
  approximation of a posterior function draw that can be queried at
  arbitrary points.

The inner multi-objective problem minimizes everything, so
:func:`cheap_objective` negates EI and UCB and passes LCB / TS through.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.stats import norm

from .gp import GpModel, Posterior, se_kernel_matrix

__all__ = [
    "BetaSchedule",
    "AcquisitionSpec",
    "SamplePath",
    "beta_t",
    "ucb",
    "lcb",
    "ei",
    "log_ei",
    "draw_prior_path",
    "draw_sample_path",
    "cheap_objective",
    "make_cheap_objectives",
]

ACQUISITION_KINDS = ("ei", "ucb", "lcb", "ts")


@dataclass(frozen=True)
class BetaSchedule:
    """Confidence-width schedule ``beta_t = 2 ln(N pi^2 t^2 / (6 delta))``.

    ``cardinality_proxy`` stands in for the (finite) number of candidate
    inputs; the search space here is continuous, so it is a configurable
    constant recorded in run metadata.
    """

    cardinality_proxy: float = 1e6
    delta: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.cardinality_proxy < 1.0:
            raise ValueError("cardinality_proxy must be >= 1")


def beta_t(schedule: BetaSchedule, t: int) -> float:
    if t < 1:
        raise ValueError("iteration index t starts at 1")
    return 2.0 * math.log(
        schedule.cardinality_proxy * math.pi**2 * t**2 / (6.0 * schedule.delta)
    )


def ucb(mean, stddev, beta: float):
    """Upper confidence bound; accepts scalars or arrays."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    return mean + math.sqrt(beta) * stddev


def lcb(mean, stddev, beta: float):
    """Lower confidence bound; accepts scalars or arrays."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    return mean - math.sqrt(beta) * stddev


def ei(mean, stddev, tau: float):
    """Expected improvement below ``tau`` (minimization).

    ``sigma * (a * Phi(a) + phi(a))`` with ``a = (tau - mean) / sigma``;
    at ``sigma == 0`` this degenerates to ``max(tau - mean, 0)``.
    """
    mean = np.asarray(mean, dtype=float)
    stddev = np.asarray(stddev, dtype=float)
    out = np.maximum(tau - mean, 0.0)
    mask = stddev > 0
    if np.any(mask):
        a = (tau - mean[mask]) / stddev[mask]
        out = np.array(out, dtype=float)
        out[mask] = stddev[mask] * (a * norm.cdf(a) + norm.pdf(a))
    return out if out.ndim else float(out)


_LOG_EI_TAIL = -25.0
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def log_ei(mean, stddev, tau: float):
    """``log(ei(...))``, stable far into the no-improvement tail.

    Plain EI underflows to exactly zero once ``a = (tau - mean) / sigma``
    drops below about -38, which erases the ordering between weak
    candidates; the log form keeps them comparable. For ``a`` below a
    cutoff the asymptotic expansion ``a Phi(a) + phi(a) ~ phi(a) / a^2``
    is used. ``sigma == 0`` maps to -inf (no accessible improvement).
    """
    mean = np.asarray(mean, dtype=float)
    stddev = np.asarray(stddev, dtype=float)
    shape = np.broadcast_shapes(mean.shape, stddev.shape)
    mean = np.broadcast_to(mean, shape)
    stddev = np.broadcast_to(stddev, shape)
    out = np.full(shape, -np.inf)
    mask = stddev > 0
    if np.any(mask):
        a = (tau - mean[mask]) / stddev[mask]
        direct = np.zeros_like(a)
        safe = a > _LOG_EI_TAIL
        with np.errstate(divide="ignore"):
            direct[safe] = np.log(a[safe] * norm.cdf(a[safe]) + norm.pdf(a[safe]))
        tail = ~safe
        at2 = a[tail] ** 2
        # a Phi(a) + phi(a) = phi(a) a^-2 (1 - 3 a^-2 + 15 a^-4 - 105 a^-6 + ...)
        series = 1.0 - 3.0 / at2 + 15.0 / at2**2 - 105.0 / at2**3
        direct[tail] = -0.5 * at2 - _LOG_SQRT_2PI + np.log(series) - np.log(at2)
        out[mask] = np.log(stddev[mask]) + direct
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SamplePath:
    """One fixed function drawn from a GP, in random-feature form.

    ``f(x) = amplitude * cos(x @ feature_weights.T + feature_phases) @
    linear_weights``; deterministic after construction and safe to share
    across threads.
    """

    feature_weights: np.ndarray  # (m, d) spectral frequencies
    feature_phases: np.ndarray  # (m,)
    linear_weights: np.ndarray  # (m,)
    amplitude: float

    @property
    def m(self) -> int:
        return self.linear_weights.size

    def __call__(self, x: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(x, dtype=float))
        phi = self.amplitude * np.cos(X @ self.feature_weights.T + self.feature_phases)
        return phi @ self.linear_weights


def _features(kernel, dim: int, m: int, rng: np.random.Generator):
    """Spectral frequencies and phases for the SE kernel: w ~ N(0, diag(1/l^2))."""
    W = rng.standard_normal((m, dim)) / kernel.lengthscales
    b = rng.uniform(0.0, 2.0 * np.pi, size=m)
    amplitude = math.sqrt(2.0 * kernel.signal_variance / m)
    return W, b, amplitude


def draw_prior_path(kernel, dim: int, m: int, rng: np.random.Generator | int) -> SamplePath:
    """Unconditioned draw: weights ~ N(0, I) reproduce the kernel in expectation."""
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    W, b, amplitude = _features(kernel, dim, m, rng)
    return SamplePath(W, b, rng.standard_normal(m), amplitude)


def draw_sample_path(model: GpModel, m: int, rng: np.random.Generator | int) -> SamplePath:
    """Posterior draw conditioned on the model's (normalized) training data.

    Bayesian linear regression over the feature weights with unit prior:
    the posterior over ``theta`` given ``y = Phi theta + eps`` has
    covariance ``(I + Phi^T Phi / s2)^-1``; one sample of it is frozen into
    the returned path.
    """
    if m < 1:
        raise ValueError("need at least one spectral feature")
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    W, b, amplitude = _features(model.kernel, model.dim, m, rng)
    phi = amplitude * np.cos(model.train_inputs @ W.T + b)
    s2 = max(model.kernel.noise_variance + model.jitter, 1e-10)
    A = np.eye(m) + phi.T @ phi / s2
    La = cholesky(A, lower=True)
    mean = cho_solve((La, True), phi.T @ model.train_targets / s2)
    # theta = mean + A^{-1/2} z realized through the upper factor
    z = rng.standard_normal(m)
    theta = mean + solve_triangular(La.T, z, lower=False)
    return SamplePath(W, b, theta, amplitude)


@dataclass(frozen=True)
class AcquisitionSpec:
    """Which acquisition drives the inner problem; shared by all objectives."""

    kind: str = "ei"
    beta: BetaSchedule = field(default_factory=BetaSchedule)
    ts_features: int = 500

    def __post_init__(self):
        if self.kind not in ACQUISITION_KINDS:
            raise ValueError(f"kind must be one of {ACQUISITION_KINDS}, got {self.kind!r}")


def cheap_objective(
    spec: AcquisitionSpec,
    model: GpModel,
    path: SamplePath | None,
    tau: float,
    t: int,
    x: np.ndarray,
) -> float:
    """Value the inner solver minimizes for one objective at one point.

    LCB and TS are already promising-when-small; UCB is negated. EI enters
    as the negated log (the monotone transform leaves the inner Pareto set
    unchanged while surviving EI's underflow to zero, which would otherwise
    collapse the trade-off structure late in a run).
    """
    from .gp import predict

    if spec.kind == "ts":
        if path is None:
            raise ValueError("Thompson sampling needs a sample path")
        return float(path(x)[0])
    mean, std = predict(model, x)
    b = beta_t(spec.beta, t)
    if spec.kind == "lcb":
        return float(lcb(mean[0], std[0], b))
    if spec.kind == "ucb":
        return float(-ucb(mean[0], std[0], b))
    return float(-log_ei(mean[0], std[0], tau))


def make_cheap_objectives(
    spec: AcquisitionSpec,
    models: Sequence[GpModel],
    t: int,
    rng: np.random.Generator,
) -> list[Callable[[np.ndarray], np.ndarray]]:
    """Batched inner objectives, one per surrogate, for the current iteration.

    For TS a fresh path per objective is drawn here and shared by every
    query the inner solver makes this iteration.
    """
    from .gp import predict

    b = beta_t(spec.beta, t)
    objectives: list[Callable[[np.ndarray], np.ndarray]] = []
    for model in models:
        if spec.kind == "ts":
            path = draw_sample_path(model, spec.ts_features, rng)
            objectives.append(path)
            continue
        tau = float(np.min(model.train_targets))

        def obj(X, _model=model, _tau=tau):
            mean, std = predict(_model, X)
            if spec.kind == "lcb":
                return lcb(mean, std, b)
            if spec.kind == "ucb":
                return -ucb(mean, std, b)
            return -log_ei(mean, std, _tau)

        objectives.append(obj)
    return objectives
