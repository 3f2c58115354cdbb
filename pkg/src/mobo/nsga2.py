"""NSGA-II for the inner (cheap) multi-objective problem.

Canonical operators: fast non-dominated sorting, crowding distance, binary
tournament on (rank, crowding), simulated binary crossover, and polynomial
mutation. Objective callables are batched: they take an ``(n, d)`` array and
return an ``(n,)`` array. The evaluation budget counts vector evaluations
(one per population row per round); a whole solve is deterministic given its
config seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import BoxDomain

__all__ = [
    "Nsga2Config",
    "SolveResult",
    "fast_nondominated_sort",
    "crowding_distance",
    "solve",
]


@dataclass(frozen=True)
class Nsga2Config:
    population_size: int = 50
    evaluation_budget: int = 1500
    crossover_prob: float = 0.9
    crossover_eta: float = 15.0
    mutation_prob_per_dim: float | None = None  # None means 1/d
    mutation_eta: float = 20.0
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2 or self.population_size % 2:
            raise ValueError("population_size must be even and >= 2")
        if self.evaluation_budget < self.population_size:
            raise ValueError("evaluation_budget must cover at least one population")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError("crossover_prob must lie in [0, 1]")
        if self.mutation_prob_per_dim is not None and not 0.0 <= self.mutation_prob_per_dim <= 1.0:
            raise ValueError("mutation_prob_per_dim must lie in [0, 1]")


def fast_nondominated_sort(values: np.ndarray) -> list[list[int]]:
    """Partition rows of ``values`` into dominance fronts (lists of indices).

    Front 0 is the non-dominated set; front r is non-dominated once fronts
    < r are removed. Indices within a front are ascending.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if n == 0:
        return []
    a = values[:, None, :]
    b = values[None, :, :]
    dom = np.all(a <= b, axis=-1) & np.any(a < b, axis=-1)  # dom[i, j]: i dominates j
    n_dominating = dom.sum(axis=0)

    fronts: list[list[int]] = []
    assigned = np.zeros(n, dtype=bool)
    remaining = n
    while remaining:
        current = np.flatnonzero((n_dominating == 0) & ~assigned)
        fronts.append(current.tolist())
        assigned[current] = True
        remaining -= current.size
        n_dominating = n_dominating - dom[current].sum(axis=0)
    return fronts


def crowding_distance(values: np.ndarray) -> np.ndarray:
    """Crowding distances for one front of objective vectors ``(n, k)``.

    Boundary members per objective get +inf; interior members accumulate
    the normalized gap between their neighbors. An objective with zero
    range contributes nothing.
    """
    values = np.asarray(values, dtype=float)
    n, k = values.shape
    if n == 0:
        raise ValueError("front must be non-empty")
    dist = np.zeros(n)
    for j in range(k):
        order = np.argsort(values[:, j], kind="stable")
        col = values[order, j]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        rng = col[-1] - col[0]
        if rng <= 0 or n < 3:
            continue
        dist[order[1:-1]] += (col[2:] - col[:-2]) / rng
    return dist


def _rank_and_crowding(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ranks = np.empty(values.shape[0], dtype=int)
    crowd = np.empty(values.shape[0])
    for r, front in enumerate(fast_nondominated_sort(values)):
        idx = np.asarray(front)
        ranks[idx] = r
        crowd[idx] = crowding_distance(values[idx])
    return ranks, crowd


def _tournament(ranks, crowd, i, j) -> int:
    """Binary tournament winner: lower rank, then larger crowding, then lower index."""
    if ranks[i] != ranks[j]:
        return i if ranks[i] < ranks[j] else j
    if crowd[i] != crowd[j]:
        return i if crowd[i] > crowd[j] else j
    return min(i, j)


def _sbx(parents_a, parents_b, prob, eta, rng):
    """Simulated binary crossover on paired parent rows."""
    n, d = parents_a.shape
    c1 = parents_a.copy()
    c2 = parents_b.copy()
    do_pair = rng.random(n) < prob
    do_var = (rng.random((n, d)) < 0.5) & do_pair[:, None]
    u = rng.random((n, d))
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)),
        (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0)),
    )
    v1 = 0.5 * ((1 + beta) * parents_a + (1 - beta) * parents_b)
    v2 = 0.5 * ((1 - beta) * parents_a + (1 + beta) * parents_b)
    c1[do_var] = v1[do_var]
    c2[do_var] = v2[do_var]
    return c1, c2


def _polynomial_mutation(x, domain, prob, eta, rng):
    n, d = x.shape
    do = rng.random((n, d)) < prob
    u = rng.random((n, d))
    delta = np.where(
        u < 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)) - 1.0,
        1.0 - (2.0 * (1.0 - u)) ** (1.0 / (eta + 1.0)),
    )
    out = x.copy()
    step = delta * domain.span
    out[do] = x[do] + step[do]
    return out


@dataclass(frozen=True)
class SolveResult:
    """Rank-0 front of the final population (duplicates in x removed)."""

    points: np.ndarray  # (m, d)
    objectives: np.ndarray  # (m, k)
    evaluations: int
    history: list[np.ndarray] | None = None

    def __iter__(self):
        return iter(zip(self.points, self.objectives))


def _evaluate(objectives, X) -> np.ndarray:
    cols = [np.asarray(f(X), dtype=float).ravel() for f in objectives]
    return np.column_stack(cols)


def solve(
    objectives: Sequence[Callable[[np.ndarray], np.ndarray]],
    domain: BoxDomain,
    cfg: Nsga2Config,
    return_history: bool = False,
) -> SolveResult:
    """Minimize the objective tuple over the box; return the estimated Pareto set.

    Total vector evaluations never exceed ``cfg.evaluation_budget``. With
    ``return_history`` the elitist rank-0 front of each round's combined
    population is recorded (objective space only).
    """
    if len(objectives) < 1:
        raise ValueError("need at least one objective")
    rng = np.random.default_rng(cfg.seed)
    n = cfg.population_size
    d = domain.dim
    p_mut = cfg.mutation_prob_per_dim if cfg.mutation_prob_per_dim is not None else 1.0 / d

    X = domain.sample(rng, n)
    Y = _evaluate(objectives, X)
    evals = n
    ranks, crowd = _rank_and_crowding(Y)
    history: list[np.ndarray] | None = [] if return_history else None
    if history is not None:
        history.append(Y[ranks == 0].copy())

    while evals + n <= cfg.evaluation_budget:
        # binary tournaments fill the mating pool
        picks = rng.integers(0, n, size=(n, 2))
        pool = np.array([_tournament(ranks, crowd, i, j) for i, j in picks])
        pa = X[pool[: n // 2]]
        pb = X[pool[n // 2 :]]
        c1, c2 = _sbx(pa, pb, cfg.crossover_prob, cfg.crossover_eta, rng)
        children = np.vstack((c1, c2))
        children = _polynomial_mutation(children, domain, p_mut, cfg.mutation_eta, rng)
        children = domain.clip(children)

        Yc = _evaluate(objectives, children)
        evals += n

        X_all = np.vstack((X, children))
        Y_all = np.vstack((Y, Yc))
        fronts = fast_nondominated_sort(Y_all)
        if history is not None:
            history.append(Y_all[np.asarray(fronts[0])].copy())

        keep: list[int] = []
        for front in fronts:
            if len(keep) + len(front) <= n:
                keep.extend(front)
                if len(keep) == n:
                    break
            else:
                cd = crowding_distance(Y_all[np.asarray(front)])
                order = np.lexsort((np.asarray(front), -cd))  # crowding desc, index asc
                keep.extend(np.asarray(front)[order[: n - len(keep)]].tolist())
                break
        idx = np.asarray(keep)
        X, Y = X_all[idx], Y_all[idx]
        ranks, crowd = _rank_and_crowding(Y)

    front0 = ranks == 0
    Xf, Yf = X[front0], Y[front0]
    _, unique_idx = np.unique(Xf, axis=0, return_index=True)
    unique_idx = np.sort(unique_idx)
    return SolveResult(
        points=Xf[unique_idx],
        objectives=Yf[unique_idx],
        evaluations=evals,
        history=history,
    )
