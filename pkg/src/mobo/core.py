"""Domain primitives: search box, evaluations, Pareto dominance, archive.

Conventions used throughout the package:

* inputs are 1-D float arrays of length ``d`` (batches are ``(n, d)``),
* objective vectors are 1-D float arrays of length ``k >= 2`` (batches are
  ``(n, k)``), minimization everywhere,
* dominance comparisons are exact floating-point comparisons; tolerances
  belong in metrics, not here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BoxDomain",
    "Evaluation",
    "EvaluationLog",
    "ParetoArchive",
    "dominates",
    "pareto_filter",
    "archive_insert",
]


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned continuous search box ``[lower, upper] in R^d``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.ndim != 1 or lo.shape != hi.shape or lo.size < 1:
            raise ValueError("lower and upper must be 1-D arrays of equal length >= 1")
        if not np.all(lo < hi):
            raise ValueError("every lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def unit(cls, dim: int) -> "BoxDomain":
        return cls(np.zeros(dim), np.ones(dim))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def span(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x: np.ndarray, atol: float = 0.0) -> bool:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return bool(
            np.all(x >= self.lower - atol) and np.all(x <= self.upper + atol)
        )

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Uniform sample of ``n`` points inside the box, shape ``(n, d)``."""
        return rng.uniform(self.lower, self.upper, size=(n, self.dim))


def dominates(a: np.ndarray, b: np.ndarray) -> bool:
    """Pareto dominance for minimization: ``a <= b`` everywhere, ``<`` somewhere."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"objective vectors must share one shape, got {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def _dominance_masks(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pairwise dominance and equality matrices for a ``(n, k)`` value array."""
    a = values[:, None, :]
    b = values[None, :, :]
    dom = np.all(a <= b, axis=-1) & np.any(a < b, axis=-1)
    eq = np.all(a == b, axis=-1)
    return dom, eq


def pareto_filter(values: np.ndarray) -> np.ndarray:
    """Non-dominated subset of ``values`` (shape ``(n, k)``), original order.

    Exact duplicates of a non-dominated vector are kept once (first arrival).
    An empty input yields an empty ``(0, k)`` result.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return values.reshape(0, values.shape[-1] if values.ndim == 2 else 0)
    if values.ndim != 2:
        raise ValueError("expected a (n, k) array of objective vectors")
    dom, eq = _dominance_masks(values)
    dominated = dom.any(axis=0)
    # mark later duplicates of an earlier row
    later_dup = np.triu(eq, k=1).any(axis=0)
    return values[~dominated & ~later_dup]


@dataclass(frozen=True)
class Evaluation:
    """One expensive evaluation: input point, objective vector, iteration index."""

    input: np.ndarray
    output: np.ndarray
    iteration: int = 0

    def __post_init__(self):
        object.__setattr__(self, "input", np.asarray(self.input, dtype=float))
        object.__setattr__(self, "output", np.asarray(self.output, dtype=float))
        if self.iteration < 0:
            raise ValueError("iteration must be non-negative")
        if not np.all(np.isfinite(self.output)):
            raise ValueError("objective values must be finite")


class EvaluationLog:
    """Append-only training data ``D``; exposes stacked array views."""

    def __init__(self, evaluations: list[Evaluation] | None = None):
        self._entries: list[Evaluation] = []
        for e in evaluations or []:
            self.append(e)

    def append(self, e: Evaluation) -> None:
        if self._entries and e.output.shape != self._entries[0].output.shape:
            raise ValueError("objective dimension must stay constant within one log")
        self._entries.append(e)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __getitem__(self, i):
        return self._entries[i]

    @property
    def inputs(self) -> np.ndarray:
        return np.array([e.input for e in self._entries], dtype=float)

    @property
    def outputs(self) -> np.ndarray:
        return np.array([e.output for e in self._entries], dtype=float)


class ParetoArchive:
    """Mutually non-dominated set of evaluations with dominance-based insertion.

    Confined to a single optimizer run; not safe for concurrent mutation.
    """

    def __init__(self, entries: list[Evaluation] | None = None):
        self.entries: list[Evaluation] = []
        for e in entries or []:
            self.insert(e)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def insert(self, e: Evaluation) -> bool:
        """Insert ``e`` unless dominated; evict entries ``e`` dominates.

        Returns True when the archive changed. A duplicate of an existing
        objective vector is collapsed onto the first arrival.
        """
        if self.entries and e.output.shape != self.entries[0].output.shape:
            raise ValueError("objective dimension mismatch with archive")
        for existing in self.entries:
            if dominates(existing.output, e.output):
                return False
            if np.array_equal(existing.output, e.output):
                return False
        self.entries = [x for x in self.entries if not dominates(e.output, x.output)]
        self.entries.append(e)
        return True

    @property
    def points(self) -> np.ndarray:
        return np.array([e.input for e in self.entries], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([e.output for e in self.entries], dtype=float)


def archive_insert(archive: ParetoArchive, e: Evaluation) -> ParetoArchive:
    """Functional-style alias for :meth:`ParetoArchive.insert`."""
    archive.insert(e)
    return archive
