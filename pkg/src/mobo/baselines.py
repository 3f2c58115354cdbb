"""Baselines runnable under the identical harness and budget accounting.

* ParEGO: a fresh random scalarization each iteration, one GP on the
  scalarized targets, expected improvement maximized by the inner solver
  in single-objective mode.
* Random search: uniform proposals, the sanity floor.

Both consume exactly one true evaluation per iteration and log the same
per-iteration metrics (always computed on the raw, unscalarized
objectives).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from . import gp
from .acquisition import ei
from .core import Evaluation, EvaluationLog, ParetoArchive
from .nsga2 import solve
from .optimizer import (
    OptimizerConfig,
    OptimizerState,
    RunRecord,
    _evaluate_point,
    _record_metrics,
    sobol_initial_design,
)

__all__ = [
    "ScalarizationWeights",
    "sample_weights",
    "scalarize",
    "parego_step",
    "parego_run",
    "random_search_step",
    "random_search_run",
]

AUGMENTATION_RHO = 0.05


@dataclass(frozen=True)
class ScalarizationWeights:
    """Point on the (k-1)-simplex plus the augmentation coefficient."""

    lam: np.ndarray
    rho: float = AUGMENTATION_RHO

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        if np.any(lam < 0) or abs(lam.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be non-negative and sum to one")
        object.__setattr__(self, "lam", lam)


def sample_weights(k: int, rng: np.random.Generator) -> ScalarizationWeights:
    """Uniform draw from the simplex via exponential normalization."""
    if k < 2:
        raise ValueError("need at least two objectives")
    e = rng.standard_exponential(k)
    return ScalarizationWeights(lam=e / e.sum())


def scalarize(y: np.ndarray, w: ScalarizationWeights) -> np.ndarray:
    """Augmented Tchebycheff: ``max_i(lam_i y_i) + rho * sum_i(lam_i y_i)``.

    ``y`` must be normalized so the objectives are comparable; accepts one
    vector or an ``(n, k)`` batch.
    """
    Y = np.atleast_2d(np.asarray(y, dtype=float))
    if Y.shape[1] != w.lam.size:
        raise ValueError("objective and weight dimensions disagree")
    weighted = Y * w.lam
    out = weighted.max(axis=1) + w.rho * weighted.sum(axis=1)
    return out if np.asarray(y).ndim > 1 else float(out[0])


def _normalize_outputs(Y: np.ndarray) -> np.ndarray:
    mu = Y.mean(axis=0)
    sd = np.where(Y.std(axis=0) > 1e-12, Y.std(axis=0), 1.0)
    return (Y - mu) / sd


def parego_step(state: OptimizerState, cfg: OptimizerConfig, problem) -> RunRecord:
    """One ParEGO iteration: scalarize, fit one GP, maximize EI, evaluate."""
    state.iteration += 1
    t = state.iteration

    Y = state.log.outputs
    w = sample_weights(Y.shape[1], state.rng)
    targets = scalarize(_normalize_outputs(Y), w)

    X = state.log.inputs
    params = state.models[0].kernel if state.models else gp.SeKernelParams(
        signal_variance=1.0,
        lengthscales=0.25 * problem.domain.span,
        noise_variance=cfg.noise_variance,
    )
    model = gp.fit(X, targets, params)
    if len(state.log) % cfg.refit_every == 0:
        model = gp.refit_hyperparameters(
            model, state.rng, lengthscale_span=problem.domain.span, isotropic=cfg.isotropic
        )
    state.models = [model]

    tic = time.perf_counter() if cfg.measure_time else 0.0
    tau = float(np.min(model.train_targets))

    def neg_ei(XX):
        mean, std = gp.predict(model, XX)
        return -ei(mean, std, tau)

    inner_cfg = replace(
        cfg.nsga2, seed=int(np.random.default_rng((cfg.seed, t)).integers(2**31))
    )
    result = solve([neg_ei], problem.domain, inner_cfg)
    best = int(np.argmin(result.objectives[:, 0]))
    acq_time = (time.perf_counter() - tic) if cfg.measure_time else 0.0

    x, y = _evaluate_point(problem, result.points[best])
    e = Evaluation(input=x, output=y, iteration=t)
    state.log.append(e)
    state.archive.insert(e)
    return _record_metrics(state, problem, x, y, acq_time)


def parego_run(cfg: OptimizerConfig, problem) -> tuple[ParetoArchive, list[RunRecord]]:
    state = _initialize_without_models(problem, cfg)
    trace = [parego_step(state, cfg, problem) for _ in range(cfg.max_iterations)]
    return state.archive, trace


def random_search_step(state: OptimizerState, cfg: OptimizerConfig, problem) -> RunRecord:
    """Uniform proposal inside the box, evaluated and logged."""
    state.iteration += 1
    proposal = state.rng.uniform(problem.domain.lower, problem.domain.upper)
    x, y = _evaluate_point(problem, proposal)
    e = Evaluation(input=x, output=y, iteration=state.iteration)
    state.log.append(e)
    state.archive.insert(e)
    return _record_metrics(state, problem, x, y, 0.0)


def random_search_run(cfg: OptimizerConfig, problem) -> tuple[ParetoArchive, list[RunRecord]]:
    state = _initialize_without_models(problem, cfg)
    trace = [random_search_step(state, cfg, problem) for _ in range(cfg.max_iterations)]
    return state.archive, trace


def _initialize_without_models(problem, cfg: OptimizerConfig) -> OptimizerState:
    """Same Sobol initial design as the main optimizer, no per-objective GPs."""
    rng = np.random.default_rng(cfg.seed)
    n0 = cfg.resolve_initial_points(problem.domain.dim)
    design = sobol_initial_design(problem.domain, n0, seed=cfg.seed)
    state = OptimizerState(
        log=EvaluationLog(), models=[], archive=ParetoArchive(), iteration=0, rng=rng
    )
    for row in design:
        x, y = _evaluate_point(problem, row)
        e = Evaluation(input=x, output=y, iteration=0)
        state.log.append(e)
        state.archive.insert(e)
    return state
