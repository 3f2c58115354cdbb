"""Synthetic multi-objective benchmarks and a tabular-dataset adapter.

Every synthetic problem exposes the shared search box ``[0, 1]^d``; each
component function rescales its input affinely onto that function's own
standard domain before evaluating. All component definitions follow the
classic single-objective test-function suite; everything is minimized.

Ideal Pareto fronts come in two flavors: analytic (ZDT1, DTLZ1) and cached
(all combination benchmarks), where the cache is produced once by a
large-budget NSGA-II run on the true objectives and shipped with the
package together with its generation manifest.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from .core import BoxDomain, pareto_filter
from .nsga2 import Nsga2Config, solve

__all__ = [
    "BenchmarkProblem",
    "TabularProblem",
    "make_benchmark",
    "benchmark_names",
    "ideal_front_of",
    "reference_point_of",
    "generate_front_cache",
    "verify_front_cache",
    "load_tabular",
    "front_cache_dir",
    "FrontCacheMissing",
]

# ---------------------------------------------------------------------------
# component functions on their native domains (inputs (n, d) -> (n,))
# ---------------------------------------------------------------------------


def branin(x: np.ndarray) -> np.ndarray:
    x1, x2 = x[:, 0], x[:, 1]
    a, b, c = 1.0, 5.1 / (4 * np.pi**2), 5.0 / np.pi
    r, s, t = 6.0, 10.0, 1.0 / (8 * np.pi)
    return a * (x2 - b * x1**2 + c * x1 - r) ** 2 + s * (1 - t) * np.cos(x1) + s


def currin(x: np.ndarray) -> np.ndarray:
    x1, x2 = x[:, 0], x[:, 1]
    with np.errstate(divide="ignore"):
        damp = np.where(x2 > 0, 1.0 - np.exp(-1.0 / np.where(x2 > 0, 2 * x2, 1.0)), 1.0)
    num = 2300 * x1**3 + 1900 * x1**2 + 2092 * x1 + 60
    den = 100 * x1**3 + 500 * x1**2 + 4 * x1 + 20
    return damp * num / den


def ackley(x: np.ndarray) -> np.ndarray:
    a, b, c = 20.0, 0.2, 2 * np.pi
    d = x.shape[1]
    return (
        -a * np.exp(-b * np.sqrt(np.sum(x**2, axis=1) / d))
        - np.exp(np.sum(np.cos(c * x), axis=1) / d)
        + a
        + np.e
    )


def rosenbrock(x: np.ndarray) -> np.ndarray:
    return np.sum(100.0 * (x[:, 1:] - x[:, :-1] ** 2) ** 2 + (1.0 - x[:, :-1]) ** 2, axis=1)


def sphere(x: np.ndarray) -> np.ndarray:
    return np.sum(x**2, axis=1)


def powell(x: np.ndarray) -> np.ndarray:
    # groups of four variables; trailing dimensions beyond the last full
    # group do not contribute
    d = x.shape[1]
    total = np.zeros(x.shape[0])
    for g in range(d // 4):
        x1, x2, x3, x4 = (x[:, 4 * g + j] for j in range(4))
        total += (
            (x1 + 10 * x2) ** 2
            + 5 * (x3 - x4) ** 2
            + (x2 - 2 * x3) ** 4
            + 10 * (x1 - x4) ** 4
        )
    return total


def rastrigin(x: np.ndarray) -> np.ndarray:
    return 10.0 * x.shape[1] + np.sum(x**2 - 10.0 * np.cos(2 * np.pi * x), axis=1)


def dixon_price(x: np.ndarray) -> np.ndarray:
    i = np.arange(2, x.shape[1] + 1)
    return (x[:, 0] - 1.0) ** 2 + np.sum(i * (2 * x[:, 1:] ** 2 - x[:, :-1]) ** 2, axis=1)


def zakharov(x: np.ndarray) -> np.ndarray:
    i = np.arange(1, x.shape[1] + 1)
    s = np.sum(0.5 * i * x, axis=1)
    return np.sum(x**2, axis=1) + s**2 + s**4


def perm(x: np.ndarray, beta: float = 0.5) -> np.ndarray:
    d = x.shape[1]
    j = np.arange(1, d + 1, dtype=float)
    total = np.zeros(x.shape[0])
    for i in range(1, d + 1):
        total += np.sum((j**i + beta) * ((x / j) ** i - 1.0), axis=1) ** 2
    return total


def sum_squares(x: np.ndarray) -> np.ndarray:
    i = np.arange(1, x.shape[1] + 1)
    return np.sum(i * x**2, axis=1)


NATIVE_DOMAINS: dict[str, Callable[[int], tuple[np.ndarray, np.ndarray]]] = {
    "branin": lambda d: (np.array([-5.0, 0.0]), np.array([10.0, 15.0])),
    "currin": lambda d: (np.zeros(2), np.ones(2)),
    "ackley": lambda d: (np.full(d, -32.768), np.full(d, 32.768)),
    "rosenbrock": lambda d: (np.full(d, -5.0), np.full(d, 10.0)),
    "sphere": lambda d: (np.full(d, -5.12), np.full(d, 5.12)),
    "powell": lambda d: (np.full(d, -4.0), np.full(d, 5.0)),
    "rastrigin": lambda d: (np.full(d, -5.12), np.full(d, 5.12)),
    "dixon_price": lambda d: (np.full(d, -10.0), np.full(d, 10.0)),
    "zakharov": lambda d: (np.full(d, -5.0), np.full(d, 10.0)),
    "perm": lambda d: (np.full(d, -float(d)), np.full(d, float(d))),
    "sum_squares": lambda d: (np.full(d, -10.0), np.full(d, 10.0)),
}

_COMPONENTS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "branin": branin,
    "currin": currin,
    "ackley": ackley,
    "rosenbrock": rosenbrock,
    "sphere": sphere,
    "powell": powell,
    "rastrigin": rastrigin,
    "dixon_price": dixon_price,
    "zakharov": zakharov,
    "perm": perm,
    "sum_squares": sum_squares,
}


def rescaled_component(name: str, d: int) -> Callable[[np.ndarray], np.ndarray]:
    """Component function lifted onto the shared unit box ``[0, 1]^d``."""
    f = _COMPONENTS[name]
    lo, hi = NATIVE_DOMAINS[name](d)

    def wrapped(u: np.ndarray) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        return f(lo + u * (hi - lo))

    wrapped.__name__ = name
    return wrapped


def zdt1_objectives(d: int) -> list[Callable[[np.ndarray], np.ndarray]]:
    def f1(u: np.ndarray) -> np.ndarray:
        return np.atleast_2d(u)[:, 0]

    def f2(u: np.ndarray) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        g = 1.0 + 9.0 * np.sum(u[:, 1:], axis=1) / (d - 1)
        return g * (1.0 - np.sqrt(u[:, 0] / g))

    return [f1, f2]


def dtlz1_objectives(k: int, d: int) -> list[Callable[[np.ndarray], np.ndarray]]:
    """Standard DTLZ1 with ``k`` objectives over ``d`` variables.

    With d <= k-1 the distance block is empty (g == 0) and every feasible
    point already lies on the simplex front.
    """
    n_pos = k - 1

    def g_of(u: np.ndarray) -> np.ndarray:
        tail = u[:, n_pos:]
        if tail.shape[1] == 0:
            return np.zeros(u.shape[0])
        z = tail - 0.5
        return 100.0 * (tail.shape[1] + np.sum(z**2 - np.cos(20 * np.pi * z), axis=1))

    def make(i: int) -> Callable[[np.ndarray], np.ndarray]:
        def fi(u: np.ndarray) -> np.ndarray:
            u = np.atleast_2d(np.asarray(u, dtype=float))
            g = g_of(u)
            val = 0.5 * (1.0 + g)
            val = val * np.prod(u[:, : k - 1 - i], axis=1)
            if i > 0:
                val = val * (1.0 - u[:, k - 1 - i])
            return val

        return fi

    return [make(i) for i in range(k)]


# ---------------------------------------------------------------------------
# benchmark problems
# ---------------------------------------------------------------------------


class FrontCacheMissing(RuntimeError):
    pass


@dataclass
class BenchmarkProblem:
    """A named multi-objective problem over the shared unit box."""

    name: str
    domain: BoxDomain
    objectives: list[Callable[[np.ndarray], np.ndarray]]
    analytic_front: Callable[[], np.ndarray] | None = None
    known_optima: dict[str, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    _ideal: np.ndarray | None = field(default=None, repr=False)
    _reference: np.ndarray | None = field(default=None, repr=False)

    @property
    def k(self) -> int:
        return len(self.objectives)

    @property
    def dim(self) -> int:
        return self.domain.dim

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Objective matrix ``(n, k)`` for input rows ``x``."""
        X = np.atleast_2d(np.asarray(x, dtype=float))
        return np.column_stack([np.asarray(f(X), dtype=float).ravel() for f in self.objectives])

    def ideal_front(self) -> np.ndarray:
        if self._ideal is None:
            self._ideal = ideal_front_of(self)
        return self._ideal

    def reference_point(self) -> np.ndarray:
        if self._reference is None:
            self._reference = reference_point_of(self)
        return self._reference

    def regret_reference(self) -> tuple[np.ndarray, np.ndarray] | None:
        """Pareto-optimal input used for cumulative-regret tracking.

        The sphere member is preferred when present (its minimizer is exact
        and interior); otherwise the first known optimum.
        """
        if not self.known_optima:
            return None
        if "sphere" in self.known_optima:
            return self.known_optima["sphere"]
        return next(iter(self.known_optima.values()))


_TABLE: dict[str, dict] = {
    "BC-2,2": {"components": ["branin", "currin"], "k": 2, "d": 2},
    "ZDT1": {"zdt1": True, "k": 2, "d": 4},
    "AS-2,5": {"components": ["ackley", "sphere"], "k": 2, "d": 5},
    "AR-2,5": {"components": ["ackley", "rosenbrock"], "k": 2, "d": 5},
    "RS-2,5": {"components": ["rosenbrock", "sphere"], "k": 2, "d": 5},
    "ARS-3,5": {"components": ["ackley", "rosenbrock", "sphere"], "k": 3, "d": 5},
    "DTLZ1": {"dtlz1": True, "k": 4, "d": 3},
    "PRDZPS-6,6": {
        "components": ["powell", "rastrigin", "dixon_price", "zakharov", "perm", "sum_squares"],
        "k": 6,
        "d": 6,
    },
}

# native-domain minimizers of the component functions, for regret tracking
_COMPONENT_MINIMIZERS: dict[str, Callable[[int], np.ndarray]] = {
    "sphere": lambda d: np.zeros(d),
    "rosenbrock": lambda d: np.ones(d),
    "ackley": lambda d: np.zeros(d),
    "rastrigin": lambda d: np.zeros(d),
    "sum_squares": lambda d: np.zeros(d),
}


def benchmark_names() -> list[str]:
    return list(_TABLE)


def _zdt1_front(n: int = 500) -> np.ndarray:
    f1 = np.linspace(0.0, 1.0, n)
    return np.column_stack((f1, 1.0 - np.sqrt(f1)))


def _dtlz1_front(k: int, n: int = 500, seed: int = 20240 + 1) -> np.ndarray:
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(k), size=n)
    return 0.5 * w


def make_benchmark(name: str) -> BenchmarkProblem:
    """Problem registry keyed by benchmark name; unknown names list what exists."""
    if name not in _TABLE:
        raise KeyError(
            f"unknown benchmark {name!r}; available: {', '.join(benchmark_names())}"
        )
    entry = _TABLE[name]
    k, d = entry["k"], entry["d"]
    domain = BoxDomain.unit(d)
    if entry.get("zdt1"):
        problem = BenchmarkProblem(
            name=name,
            domain=domain,
            objectives=zdt1_objectives(d),
            analytic_front=_zdt1_front,
        )
    elif entry.get("dtlz1"):
        problem = BenchmarkProblem(
            name=name,
            domain=domain,
            objectives=dtlz1_objectives(k, d),
            analytic_front=lambda: _dtlz1_front(k),
        )
    else:
        comps = entry["components"]
        problem = BenchmarkProblem(
            name=name,
            domain=domain,
            objectives=[rescaled_component(c, d) for c in comps],
        )
        for c in comps:
            if c in _COMPONENT_MINIMIZERS:
                lo, hi = NATIVE_DOMAINS[c](d)
                u_star = (_COMPONENT_MINIMIZERS[c](d) - lo) / (hi - lo)
                problem.known_optima[c] = (u_star, problem.evaluate(u_star)[0])
    return problem


# ---------------------------------------------------------------------------
# ideal fronts and reference points
# ---------------------------------------------------------------------------

FRONT_GENERATION_SEEDS = (101, 102, 103, 104, 105)
FRONT_GENERATION_BUDGET = 200_000
FRONT_GENERATION_POPULATION = 200
_REFERENCE_PROBE_SEED = 777
_REFERENCE_PROBE_LOG2 = 13  # 8192 probe points
_REFERENCE_MARGIN = 0.10


def front_cache_dir() -> Path:
    return Path(__file__).parent / "fronts"


def _cache_paths(name: str) -> tuple[Path, Path]:
    stem = name.replace(",", "_")
    base = front_cache_dir()
    return base / f"{stem}.csv", base / f"{stem}.json"


def _write_front_csv(path: Path, front: np.ndarray) -> None:
    k = front.shape[1]
    header = ",".join(f"f{i + 1}" for i in range(k))
    lines = [header]
    for row in front:
        lines.append(",".join(f"{v:.17g}" for v in row))
    path.write_text("\n".join(lines) + "\n")


def _read_front_csv(path: Path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def generate_front_cache(
    name: str,
    budget: int = FRONT_GENERATION_BUDGET,
    seeds: Sequence[int] = FRONT_GENERATION_SEEDS,
    population: int = FRONT_GENERATION_POPULATION,
    out_dir: Path | None = None,
) -> np.ndarray:
    """Build and persist the reference front for a combination benchmark.

    Runs the evolutionary solver on the true objectives once per seed,
    merges the resulting fronts, filters to the non-dominated set, and
    writes the CSV next to a manifest recording how it was made.
    """
    problem = make_benchmark(name)
    fronts = []
    for seed in seeds:
        cfg = Nsga2Config(population_size=population, evaluation_budget=budget, seed=seed)
        result = solve(problem.objectives, problem.domain, cfg)
        fronts.append(result.objectives)
    merged = pareto_filter(np.vstack(fronts))
    merged = merged[np.lexsort(merged.T[::-1])]

    csv_path, manifest_path = _cache_paths(name)
    if out_dir is not None:
        csv_path = Path(out_dir) / csv_path.name
        manifest_path = Path(out_dir) / manifest_path.name
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    _write_front_csv(csv_path, merged)
    manifest = {
        "benchmark": name,
        "budget": budget,
        "population": population,
        "seeds": list(seeds),
        "points": int(merged.shape[0]),
        "toolkit_version": _version(),
        "sha256": hashlib.sha256(csv_path.read_bytes()).hexdigest(),
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return merged


def verify_front_cache(name: str) -> dict:
    """Check the shipped cache: checksum intact and mutually non-dominated."""
    csv_path, manifest_path = _cache_paths(name)
    if not csv_path.exists() or not manifest_path.exists():
        raise FrontCacheMissing(
            f"no cached front for {name!r}; run `mobo fronts {name} --regenerate`"
        )
    manifest = json.loads(manifest_path.read_text())
    digest = hashlib.sha256(csv_path.read_bytes()).hexdigest()
    if digest != manifest.get("sha256"):
        raise RuntimeError(f"front cache for {name!r} does not match its manifest checksum")
    front = _read_front_csv(csv_path)
    if pareto_filter(front).shape[0] != front.shape[0]:
        raise RuntimeError(f"front cache for {name!r} contains dominated points")
    return manifest


def ideal_front_of(problem: BenchmarkProblem) -> np.ndarray:
    """Dense approximation of the true Pareto front used by the metrics."""
    if problem.analytic_front is not None:
        return problem.analytic_front()
    csv_path, _ = _cache_paths(problem.name)
    if not csv_path.exists():
        raise FrontCacheMissing(
            f"no cached front for {problem.name!r}; run `mobo fronts {problem.name} --regenerate`"
        )
    return _read_front_csv(csv_path)


def reference_point_of(problem: BenchmarkProblem) -> np.ndarray:
    """Frozen per-benchmark reference point for hypervolume.

    Coordinate-wise maximum over the ideal front and a fixed quasi-random
    probe of the objective space, pushed out by a 10% range margin. The
    probe stands in for the spread of values any run can observe; runs are
    clipped to this point before hypervolume computation.
    """
    ideal = problem.ideal_front()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sob = qmc.Sobol(d=problem.dim, scramble=True, seed=_REFERENCE_PROBE_SEED)
        probe = sob.random_base2(_REFERENCE_PROBE_LOG2)
    u = qmc.scale(probe, problem.domain.lower, problem.domain.upper)
    values = np.vstack((ideal, problem.evaluate(u)))
    top = values.max(axis=0)
    bottom = values.min(axis=0)
    return top + _REFERENCE_MARGIN * (top - bottom)


# ---------------------------------------------------------------------------
# tabular datasets
# ---------------------------------------------------------------------------


@dataclass
class TabularProblem:
    """Finite design space loaded from CSV; proposals snap to the nearest row."""

    name: str
    inputs: np.ndarray  # (n, d)
    values: np.ndarray  # (n, k)
    domain: BoxDomain = field(init=False)
    known_optima: dict = field(default_factory=dict)

    def __post_init__(self):
        lo = self.inputs.min(axis=0)
        hi = self.inputs.max(axis=0)
        hi = np.where(hi > lo, hi, lo + 1.0)
        self.domain = BoxDomain(lo, hi)
        self._scale = hi - lo

    @property
    def k(self) -> int:
        return self.values.shape[1]

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]

    def snap(self, x: np.ndarray) -> np.ndarray:
        """Nearest dataset row after per-dimension min-max scaling; ties go
        to the lowest row index."""
        return self.inputs[self._snap_index(x)]

    def _snap_index(self, x: np.ndarray) -> int:
        z = (np.asarray(x, dtype=float) - self.domain.lower) / self._scale
        rows = (self.inputs - self.domain.lower) / self._scale
        d2 = np.sum((rows - z) ** 2, axis=1)
        return int(np.argmin(d2))  # argmin returns the first (lowest) index on ties

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(x, dtype=float))
        return np.vstack([self.values[self._snap_index(row)] for row in X])

    def ideal_front(self) -> np.ndarray:
        return pareto_filter(self.values)

    def reference_point(self) -> np.ndarray:
        top = self.values.max(axis=0)
        bottom = self.values.min(axis=0)
        return top + _REFERENCE_MARGIN * (top - bottom)

    def regret_reference(self):
        return None


def load_tabular(path: str | Path) -> TabularProblem:
    """Parse a `x1..xd,f1..fk` CSV into a snapping lookup problem."""
    path = Path(path)
    lines = path.read_text().strip().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = [h.strip() for h in lines[0].split(",")]
    d = sum(1 for h in header if h.startswith("x"))
    k = sum(1 for h in header if h.startswith("f"))
    if d < 1 or k < 2 or d + k != len(header):
        raise ValueError(f"{path}: header must be x1..xd,f1..fk, got {header}")
    expected = [f"x{i + 1}" for i in range(d)] + [f"f{i + 1}" for i in range(k)]
    if header != expected:
        raise ValueError(f"{path}: header must be {','.join(expected)}")

    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != d + k:
            raise ValueError(f"{path}:{lineno}: expected {d + k} cells, got {len(cells)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: non-numeric cell") from exc
    data = np.asarray(rows, dtype=float)
    inputs, values = data[:, :d], data[:, d:]
    _, first = np.unique(inputs, axis=0, return_index=True)
    if first.size != inputs.shape[0]:
        dup = sorted(set(range(inputs.shape[0])) - set(first.tolist()))[0]
        raise ValueError(f"{path}:{dup + 2}: duplicate input row")
    return TabularProblem(name=path.stem, inputs=inputs, values=values)


def _version() -> str:
    from . import __version__

    return __version__
