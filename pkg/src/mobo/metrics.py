"""Front-quality metrics: Pareto hypervolume, average-distance R2, regret.

Minimization convention: a front point contributes the box between itself
and the reference point. The exact hypervolume uses a dimension-sweep
recursion (any k, intended for k <= 4); larger k falls back to a seeded
Monte-Carlo estimate with a reported standard error.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from .core import pareto_filter

__all__ = [
    "hypervolume",
    "hypervolume_with_error",
    "phv_difference",
    "r2_distance",
    "regret",
    "dominating_subset",
]

MC_SAMPLES = 200_000
EXACT_MAX_K = 4


def dominating_subset(front: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Rows of ``front`` that weakly dominate ``ref`` (the only HV contributors)."""
    front = np.atleast_2d(np.asarray(front, dtype=float))
    ref = np.asarray(ref, dtype=float)
    if front.size == 0:
        return front.reshape(0, ref.size)
    return front[np.all(front <= ref, axis=1)]


def _check_front(front: np.ndarray, ref: np.ndarray) -> np.ndarray:
    front = np.atleast_2d(np.asarray(front, dtype=float))
    ref = np.asarray(ref, dtype=float)
    if front.size == 0:
        return front.reshape(0, ref.size)
    if front.shape[1] != ref.size:
        raise ValueError("front and reference point disagree in dimension")
    bad = np.flatnonzero(~np.all(front <= ref, axis=1))
    if bad.size:
        raise ValueError(
            f"front point {front[bad[0]].tolist()} does not dominate the reference "
            f"point {ref.tolist()}"
        )
    return front


def _hv_sweep(gaps: np.ndarray) -> float:
    """Exact volume of the union of boxes ``[0, g_i]`` by dimension sweep.

    ``gaps`` holds positive distances to the reference point. Recursion
    peels the last coordinate: sort its distinct levels descending and sum
    slab thickness times the (k-1)-dimensional volume of the points active
    in that slab.
    """
    if gaps.shape[0] == 0:
        return 0.0
    k = gaps.shape[1]
    if k == 1:
        return float(np.max(gaps[:, 0]))
    if k == 2:
        # sweep: widest box first, each point adds the strip above the cover so far
        order = np.argsort(-gaps[:, 0], kind="stable")
        vol = 0.0
        top = 0.0
        for x, y in gaps[order]:
            if y > top:
                vol += x * (y - top)
                top = y
        return float(vol)
    levels = np.unique(gaps[:, -1])[::-1]  # descending
    vol = 0.0
    lower = np.concatenate((levels[1:], [0.0]))
    for z, z_next in zip(levels, lower):
        active = gaps[gaps[:, -1] >= z, :-1]
        vol += (z - z_next) * _hv_sweep(pareto_filter(-active) * -1.0)
    return float(vol)


def _hv_monte_carlo(
    front: np.ndarray, ref: np.ndarray, n_samples: int, seed: int
) -> tuple[float, float]:
    rng = np.random.default_rng(seed)
    lo = front.min(axis=0)
    box = np.prod(ref - lo)
    if box <= 0:
        return 0.0, 0.0
    hits = 0
    chunk = 20_000
    remaining = n_samples
    while remaining > 0:
        m = min(chunk, remaining)
        pts = rng.uniform(lo, ref, size=(m, ref.size))
        dominated = np.zeros(m, dtype=bool)
        for row in front:
            dominated |= np.all(row <= pts, axis=1)
        hits += int(dominated.sum())
        remaining -= m
    p = hits / n_samples
    est = p * box
    se = box * np.sqrt(max(p * (1.0 - p), 0.0) / n_samples)
    return float(est), float(se)


def hypervolume_with_error(
    front: np.ndarray,
    ref: np.ndarray,
    mc_samples: int = MC_SAMPLES,
    mc_seed: int = 0,
) -> tuple[float, float]:
    """Hypervolume and its standard error (0 when computed exactly).

    Every front point must weakly dominate ``ref``; use
    :func:`dominating_subset` first if that is not guaranteed.
    """
    ref = np.asarray(ref, dtype=float)
    front = _check_front(front, ref)
    if front.shape[0] == 0:
        return 0.0, 0.0
    front = pareto_filter(front)
    if ref.size <= EXACT_MAX_K:
        return _hv_sweep(ref - front), 0.0
    return _hv_monte_carlo(front, ref, mc_samples, mc_seed)


def hypervolume(front: np.ndarray, ref: np.ndarray, **kwargs) -> float:
    value, _ = hypervolume_with_error(front, ref, **kwargs)
    return value


def phv_difference(estimated: np.ndarray, ideal: np.ndarray, ref: np.ndarray, **kwargs) -> float:
    """HV(ideal) - HV(estimated), clamped at zero from below."""
    hv_ideal = hypervolume(ideal, ref, **kwargs)
    hv_est = hypervolume(estimated, ref, **kwargs)
    return max(hv_ideal - hv_est, 0.0)


def r2_distance(estimated: np.ndarray, ideal: np.ndarray) -> float:
    """Mean distance from each ideal-front point to its nearest estimated point.

    Empty estimated front maps to +inf.
    """
    ideal = np.atleast_2d(np.asarray(ideal, dtype=float))
    estimated = np.atleast_2d(np.asarray(estimated, dtype=float))
    if ideal.size == 0:
        raise ValueError("ideal front must be non-empty")
    if estimated.size == 0:
        return float("inf")
    return float(cdist(ideal, estimated).min(axis=1).mean())


def regret(values: np.ndarray, optimum_values: np.ndarray) -> float:
    """Norm of per-objective cumulative gaps against a known optimal point.

    ``values`` is the ``(T, k)`` trace of objective vectors at selected
    inputs; ``optimum_values`` the true objectives of a Pareto-optimal
    reference input.
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    star = np.asarray(optimum_values, dtype=float)
    per_objective = np.sum(values - star, axis=0)
    return float(np.linalg.norm(per_objective))
