"""Uncertainty-guided multi-objective Bayesian optimization loop.

Each iteration: fit one GP per objective, minimize the tuple of acquisition
functions with the evolutionary inner solver to get a set of promising
candidates, pick the candidate whose posterior uncertainty hyper-rectangle
has the largest volume (or a uniform pick, for the ablation), spend one
expensive evaluation there, and fold the result back into the data.
"""

from __future__ import annotations

import logging
import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import qmc

from . import gp
from .acquisition import AcquisitionSpec, beta_t, make_cheap_objectives
from .core import Evaluation, EvaluationLog, ParetoArchive
from .metrics import dominating_subset, hypervolume, phv_difference, r2_distance
from .nsga2 import Nsga2Config, solve

logger = logging.getLogger(__name__)

__all__ = [
    "OptimizerConfig",
    "OptimizerState",
    "RunRecord",
    "ObjectiveEvaluationError",
    "uncertainty_volume",
    "select_next",
    "initialize",
    "step",
    "run",
]

SELECTION_POLICIES = ("uncertainty_max", "random")


class ObjectiveEvaluationError(RuntimeError):
    """True-objective evaluation failed; carries the offending input."""

    def __init__(self, point: np.ndarray, cause: Exception):
        super().__init__(f"objective evaluation failed at {np.asarray(point).tolist()}: {cause}")
        self.point = np.asarray(point, dtype=float)


@dataclass(frozen=True)
class RunRecord:
    """Per-iteration trace row; the harness serializes these to CSV."""

    iteration: int
    point: np.ndarray
    values: np.ndarray
    phv_diff: float
    r2: float
    regret: float  # cumulative, NaN when no optimum is known
    acq_time_s: float  # cheap-solve + selection wall clock; 0 when timing is off


@dataclass(frozen=True)
class OptimizerConfig:
    acquisition: AcquisitionSpec = field(default_factory=AcquisitionSpec)
    nsga2: Nsga2Config = field(default_factory=Nsga2Config)
    max_iterations: int = 100
    initial_points: int | None = None  # None -> max(5, 2 * (d + 1))
    refit_every: int = 10
    selection_policy: str = "uncertainty_max"
    seed: int = 0
    noise_variance: float = 1e-6
    isotropic: bool = False
    measure_time: bool = True

    def __post_init__(self):
        if self.selection_policy not in SELECTION_POLICIES:
            raise ValueError(f"selection_policy must be one of {SELECTION_POLICIES}")
        if self.refit_every < 1:
            raise ValueError("refit_every must be >= 1")
        if self.initial_points is not None and self.initial_points < 2:
            raise ValueError("initial_points must be >= 2")

    def resolve_initial_points(self, dim: int) -> int:
        if self.initial_points is not None:
            return self.initial_points
        return max(5, 2 * (dim + 1))


@dataclass
class OptimizerState:
    log: EvaluationLog
    models: list[gp.GpModel]
    archive: ParetoArchive
    iteration: int
    rng: np.random.Generator
    regret_sums: np.ndarray | None = None  # per-objective cumulative gaps


def uncertainty_volume(models, x: np.ndarray, beta: float) -> np.ndarray:
    """Volume of the posterior uncertainty hyper-rectangle, batched.

    The rectangle's side for objective i is [LCB_i, UCB_i], so the volume is
    ``prod_i 2 sqrt(beta) sigma_i(x)``, in normalized target space.
    """
    if beta < 0:
        raise ValueError("beta must be non-negative")
    X = np.atleast_2d(np.asarray(x, dtype=float))
    vol = np.ones(X.shape[0])
    width = 2.0 * np.sqrt(beta)
    for model in models:
        _, std = gp.predict(model, X)
        vol *= width * std
    return vol


def select_next(
    candidates: np.ndarray,
    models,
    beta: float,
    policy: str,
    rng: np.random.Generator,
) -> int:
    """Index of the candidate to evaluate next.

    ``uncertainty_max`` takes the argmax of the uncertainty volume (ties go
    to the lowest index); ``random`` draws uniformly.
    """
    candidates = np.atleast_2d(candidates)
    if candidates.shape[0] == 0:
        raise ValueError("candidate set must be non-empty")
    if policy == "random":
        return int(rng.integers(candidates.shape[0]))
    if candidates.shape[0] == 1:
        return 0
    vols = uncertainty_volume(models, candidates, beta)
    return int(np.argmax(vols))


def sobol_initial_design(domain, n: int, seed: int) -> np.ndarray:
    """First ``n`` points of a seeded scrambled Sobol sequence over the box."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # fractional powers of two are fine here
        sob = qmc.Sobol(d=domain.dim, scramble=True, seed=seed)
        u = sob.random(n)
    return qmc.scale(u, domain.lower, domain.upper)


def _evaluate_point(problem, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One expensive evaluation; discrete problems snap the proposal first."""
    snap = getattr(problem, "snap", None)
    if snap is not None:
        x = np.asarray(snap(x), dtype=float)
    try:
        y = np.asarray(problem.evaluate(x), dtype=float).ravel()
    except Exception as exc:  # noqa: BLE001 - annotate and re-raise
        raise ObjectiveEvaluationError(x, exc) from exc
    return x, y


def _fit_models(state: OptimizerState, cfg: OptimizerConfig, problem, refit: bool) -> None:
    X = state.log.inputs
    Y = state.log.outputs
    span = problem.domain.span
    new_models = []
    for i in range(Y.shape[1]):
        if state.models:
            params = state.models[i].kernel
        else:
            params = gp.SeKernelParams(
                signal_variance=1.0,
                lengthscales=0.25 * span,
                noise_variance=cfg.noise_variance,
            )
        model = gp.fit(X, Y[:, i], params)
        if refit and len(state.log) >= 2:
            model = gp.refit_hyperparameters(
                model, state.rng, lengthscale_span=span, isotropic=cfg.isotropic
            )
            logger.debug(
                "objective %d refit: n=%d signal=%.3g noise=%.3g",
                i, model.n, model.kernel.signal_variance, model.kernel.noise_variance,
            )
        new_models.append(model)
    state.models = new_models


def _record_metrics(state: OptimizerState, problem, x: np.ndarray, y: np.ndarray,
                    acq_time: float) -> RunRecord:
    ideal = problem.ideal_front()
    ref = problem.reference_point()
    estimated = dominating_subset(state.archive.values, ref)
    phv = phv_difference(estimated, ideal, ref)
    r2 = r2_distance(estimated, ideal) if estimated.size else float("inf")

    reg = float("nan")
    star = problem.regret_reference()
    if star is not None:
        gap = y - star[1]
        state.regret_sums = gap if state.regret_sums is None else state.regret_sums + gap
        reg = float(np.linalg.norm(state.regret_sums))
    return RunRecord(
        iteration=state.iteration,
        point=x,
        values=y,
        phv_diff=phv,
        r2=r2,
        regret=reg,
        acq_time_s=acq_time,
    )


def initialize(problem, cfg: OptimizerConfig) -> OptimizerState:
    """Evaluate the Sobol initial design and fit the starting surrogates."""
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
    _fit_models(state, cfg, problem, refit=True)
    return state


def step(state: OptimizerState, cfg: OptimizerConfig, problem) -> RunRecord:
    """One outer iteration; mutates ``state`` and returns its trace record.

    The returned record's timing covers the inner solve plus selection only
    (surrogate fitting is excluded).
    """
    state.iteration += 1
    t = state.iteration
    beta = beta_t(cfg.acquisition.beta, t)

    tic = time.perf_counter() if cfg.measure_time else 0.0
    objectives = make_cheap_objectives(cfg.acquisition, state.models, t, state.rng)
    inner_cfg = replace(
        cfg.nsga2, seed=int(np.random.default_rng((cfg.seed, t)).integers(2**31))
    )
    result = solve(objectives, problem.domain, inner_cfg)
    idx = select_next(result.points, state.models, beta, cfg.selection_policy, state.rng)
    acq_time = (time.perf_counter() - tic) if cfg.measure_time else 0.0

    x, y = _evaluate_point(problem, result.points[idx])
    e = Evaluation(input=x, output=y, iteration=t)
    state.log.append(e)
    state.archive.insert(e)

    _fit_models(state, cfg, problem, refit=(len(state.log) % cfg.refit_every == 0))
    return _record_metrics(state, problem, x, y, acq_time)


def run(cfg: OptimizerConfig, problem) -> tuple[ParetoArchive, list[RunRecord]]:
    """Full optimization: initial design plus ``max_iterations`` steps."""
    state = initialize(problem, cfg)
    trace = [step(state, cfg, problem) for _ in range(cfg.max_iterations)]
    return state.archive, trace
