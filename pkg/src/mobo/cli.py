"""Experiment harness: configuration, execution, logging, and plot data.

Subcommands
-----------

* ``run``       repeated optimization runs -> per-run CSVs, summary, manifest
* ``timing``    mean +/- std of per-iteration acquisition-optimization time
* ``fronts``    regenerate or verify a benchmark's cached reference front
* ``plotdata``  merge run summaries into a long-format CSV (optionally SVG)
* ``list-benchmarks``

Configs are INI files (``key = value`` sections) and every key can be
overridden from the command line. All defaults the method leaves open are
materialized into the run manifest so no run has hidden parameters. The
``MOBO_OUTPUT_ROOT`` environment variable overrides the output root.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import hashlib
import json
import math
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .acquisition import AcquisitionSpec, BetaSchedule
from .baselines import parego_run, random_search_run
from .benchmarks import (
    FrontCacheMissing,
    benchmark_names,
    front_cache_dir,
    generate_front_cache,
    load_tabular,
    make_benchmark,
    verify_front_cache,
)
from .metrics import hypervolume_with_error, r2_distance
from .nsga2 import Nsga2Config
from .optimizer import OptimizerConfig, run as optimizer_run

METHODS = ("mobo-ei", "mobo-ts", "mobo-lcb", "parego", "random-search")

CSV_METRICS = ("phv_diff", "log10_phv_diff", "r2", "regret", "acq_time_s")


@dataclasses.dataclass
class ExperimentConfig:
    """Fully resolved experiment description (also what the manifest records)."""

    benchmark: str = "BC-2,2"
    method: str = "mobo-ei"
    selection_policy: str = "uncertainty_max"
    iterations: int = 100
    repetitions: int = 10
    seed: int = 0
    seeds: list[int] | None = None  # explicit per-repetition seeds
    output: str = "results"
    workers: int = 1
    timing: str = "wall"  # wall | off; off zeroes acq_time_s for byte-stable CSVs
    initial_points: int | None = None
    refit_every: int = 10
    noise_variance: float = 1e-6
    isotropic: bool = False
    cardinality_proxy: float = 1e6
    delta: float = 0.05
    ts_features: int = 500
    population_size: int = 50
    evaluation_budget: int = 1500

    def resolved_seeds(self) -> list[int]:
        if self.seeds is not None:
            if len(self.seeds) != self.repetitions:
                raise ValueError("repetitions must equal the number of listed seeds")
            return list(self.seeds)
        return [self.seed + i for i in range(self.repetitions)]

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.timing not in ("wall", "off"):
            raise ValueError("timing must be 'wall' or 'off'")
        if self.iterations < 0 or self.repetitions < 1:
            raise ValueError("iterations must be >= 0 and repetitions >= 1")
        self.resolved_seeds()


def _load_problem(spec: str):
    if spec in benchmark_names():
        return make_benchmark(spec)
    path = Path(spec)
    if path.exists():
        return load_tabular(path)
    raise ValueError(
        f"benchmark {spec!r} is neither a registered name ({', '.join(benchmark_names())}) "
        "nor a tabular CSV path"
    )


def _optimizer_config(cfg: ExperimentConfig, seed: int) -> OptimizerConfig:
    kind = {"mobo-ei": "ei", "mobo-ts": "ts", "mobo-lcb": "lcb"}.get(cfg.method, "ei")
    return OptimizerConfig(
        acquisition=AcquisitionSpec(
            kind=kind,
            beta=BetaSchedule(cardinality_proxy=cfg.cardinality_proxy, delta=cfg.delta),
            ts_features=cfg.ts_features,
        ),
        nsga2=Nsga2Config(
            population_size=cfg.population_size,
            evaluation_budget=cfg.evaluation_budget,
        ),
        max_iterations=cfg.iterations,
        initial_points=cfg.initial_points,
        refit_every=cfg.refit_every,
        selection_policy=cfg.selection_policy,
        seed=seed,
        noise_variance=cfg.noise_variance,
        isotropic=cfg.isotropic,
        measure_time=(cfg.timing == "wall"),
    )


def _fmt(v: float) -> str:
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def _log10(v: float) -> float:
    if math.isnan(v):
        return float("nan")
    if v <= 0.0:
        return float("-inf")
    return math.log10(v)


def execute_single_run(cfg: ExperimentConfig, seed: int) -> dict:
    """One repetition; returns header and rows ready for CSV serialization.

    Module-level so worker processes can pickle the call.
    """
    problem = _load_problem(cfg.benchmark)
    opt_cfg = _optimizer_config(cfg, seed)
    if cfg.method == "parego":
        archive, trace = parego_run(opt_cfg, problem)
    elif cfg.method == "random-search":
        archive, trace = random_search_run(opt_cfg, problem)
    else:
        archive, trace = optimizer_run(opt_cfg, problem)

    d = problem.domain.dim
    k = problem.k
    header = (
        ["t"]
        + [f"x{i + 1}" for i in range(d)]
        + [f"f{i + 1}" for i in range(k)]
        + list(CSV_METRICS)
    )
    rows = []
    for rec in trace:
        rows.append(
            [float(rec.iteration)]
            + [float(v) for v in rec.point]
            + [float(v) for v in rec.values]
            + [
                rec.phv_diff,
                _log10(rec.phv_diff),
                rec.r2,
                rec.regret,
                rec.acq_time_s,
            ]
        )
    return {
        "seed": seed,
        "header": header,
        "rows": rows,
        "initial_points": opt_cfg.resolve_initial_points(d),
        "evaluations": len(trace) + opt_cfg.resolve_initial_points(d),
        "archive_size": len(archive),
    }


def _write_csv(path: Path, header: list[str], rows: list[list[float]]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _summarize(results: list[dict]) -> dict:
    """Per-iteration mean and standard deviation across repetitions."""
    if not results:
        return {}
    header = results[0]["header"]
    cols = {name: header.index(name) for name in CSV_METRICS}
    n_iter = len(results[0]["rows"])
    summary: dict[str, dict] = {m: {"t": [], "mean": [], "std": []} for m in CSV_METRICS}
    for i in range(n_iter):
        t = results[0]["rows"][i][0]
        for m in CSV_METRICS:
            vals = [r["rows"][i][cols[m]] for r in results]
            finite = [v for v in vals if math.isfinite(v)]
            if finite and len(finite) == len(vals):
                mean = statistics.fmean(vals)
                std = statistics.pstdev(vals) if len(vals) > 1 else 0.0
            else:
                mean, std = float("nan"), float("nan")
            summary[m]["t"].append(t)
            summary[m]["mean"].append(mean)
            summary[m]["std"].append(std)
    return summary


def _front_checksums() -> dict[str, str]:
    out = {}
    base = front_cache_dir()
    if base.exists():
        for p in sorted(base.glob("*.csv")):
            out[p.name] = hashlib.sha256(p.read_bytes()).hexdigest()
    return out


def _benchmark_label(spec: str) -> str:
    if spec in benchmark_names():
        return spec
    return Path(spec).stem


def _output_dir(cfg: ExperimentConfig) -> Path:
    root = Path(os.environ.get("MOBO_OUTPUT_ROOT", cfg.output))
    name = f"{_benchmark_label(cfg.benchmark).replace(',', '_')}__{cfg.method}"
    if cfg.selection_policy != "uncertainty_max":
        name += f"__{cfg.selection_policy}"
    return root / name


def _json_sanitize(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _json_sanitize(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_json_sanitize(v) for v in obj]
    return obj


def cmd_run(cfg: ExperimentConfig, out_dir: Path | None = None) -> int:
    cfg.validate()
    out = out_dir if out_dir is not None else _output_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)
    seeds = cfg.resolved_seeds()

    # each run's CSV is flushed as soon as that run finishes, so a mid-run
    # failure still leaves the completed repetitions on disk
    results: list[dict] = []
    try:
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                stream = pool.map(execute_single_run, [cfg] * len(seeds), seeds)
                for i, res in enumerate(stream):
                    _write_csv(out / f"rep{i:02d}_seed{res['seed']}.csv",
                               res["header"], res["rows"])
                    results.append(res)
        else:
            for i, seed in enumerate(seeds):
                res = execute_single_run(cfg, seed)
                _write_csv(out / f"rep{i:02d}_seed{res['seed']}.csv",
                           res["header"], res["rows"])
                results.append(res)
    except Exception as exc:  # noqa: BLE001 - flush partial state, then fail
        print(f"error: run failed after {len(results)} repetitions: {exc}",
              file=sys.stderr)
        return 1

    summary = {
        "benchmark": _benchmark_label(cfg.benchmark),
        "method": cfg.method,
        "selection_policy": cfg.selection_policy,
        "repetitions": len(results),
        "iterations": cfg.iterations,
        "metrics": _summarize(results),
    }
    (out / "summary.json").write_text(
        json.dumps(_json_sanitize(summary), indent=2, sort_keys=True) + "\n"
    )
    manifest = {
        "config": dataclasses.asdict(cfg),
        "resolved_seeds": seeds,
        "initial_points": results[0]["initial_points"],
        "evaluations_per_run": results[0]["evaluations"],
        "toolkit_version": __version__,
        "front_cache_sha256": _front_checksums(),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(results)} runs to {out}")
    return 0


def cmd_timing(cfg: ExperimentConfig) -> int:
    """Mean +/- std of per-iteration acquisition-optimization seconds."""
    cfg.validate()
    if cfg.timing != "wall":
        raise ValueError("timing study requires timing=wall")
    times: list[float] = []
    for seed in cfg.resolved_seeds():
        res = execute_single_run(cfg, seed)
        col = res["header"].index("acq_time_s")
        times.extend(row[col] for row in res["rows"])
    mean = statistics.fmean(times) if times else float("nan")
    std = statistics.pstdev(times) if len(times) > 1 else 0.0
    print(f"{cfg.benchmark}  {cfg.method}  {mean:.3f}±{std:.3f} s")
    return 0


def cmd_fronts(benchmark: str, regenerate: bool = False) -> int:
    if benchmark not in benchmark_names():
        print(f"unknown benchmark {benchmark!r}; available: {', '.join(benchmark_names())}",
              file=sys.stderr)
        return 2
    problem = make_benchmark(benchmark)
    if problem.analytic_front is not None:
        front = problem.ideal_front()
        print(f"{benchmark}: analytic front, {front.shape[0]} points")
    elif regenerate:
        front = generate_front_cache(benchmark)
        print(f"{benchmark}: regenerated cache with {front.shape[0]} points")
    else:
        manifest = verify_front_cache(benchmark)
        front = problem.ideal_front()
        print(f"{benchmark}: cache verified ({manifest['points']} points, "
              f"seeds {manifest['seeds']})")
    ref = problem.reference_point()
    hv, se = hypervolume_with_error(front, ref)
    err = f" (stderr {se:.4g})" if se else ""
    print(f"hypervolume vs reference {np.round(ref, 6).tolist()}: {hv:.6g}{err}")
    return 0


def _load_summary(run_dir: Path) -> dict:
    path = run_dir / "summary.json"
    if not path.exists():
        raise FileNotFoundError(f"{run_dir} does not contain summary.json")
    return json.loads(path.read_text())


def cmd_plotdata(
    run_dirs: list[Path],
    out_path: Path,
    external: list[tuple[str, Path]] | None = None,
    svg_dir: Path | None = None,
) -> int:
    """Merge run summaries into `method,benchmark,t,metric,mean,std` rows."""
    series: list[dict] = []
    for run_dir in run_dirs:
        s = _load_summary(Path(run_dir))
        label = s["method"]
        if s.get("selection_policy", "uncertainty_max") != "uncertainty_max":
            label += f"[{s['selection_policy']}]"
        for metric, data in s["metrics"].items():
            series.append(
                {
                    "method": label,
                    "benchmark": s["benchmark"],
                    "metric": metric,
                    "t": data["t"],
                    "mean": data["mean"],
                    "std": data["std"],
                }
            )
    for name, path in external or []:
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        header = Path(path).read_text().splitlines()[0].split(",")
        if header[:1] != ["iteration"]:
            raise ValueError(f"{path}: external curves need an `iteration,...` header")
        for j, metric in enumerate(header[1:], start=1):
            series.append(
                {
                    "method": name,
                    "benchmark": "external",
                    "metric": metric,
                    "t": rows[:, 0].tolist(),
                    "mean": rows[:, j].tolist(),
                    "std": [0.0] * rows.shape[0],
                }
            )

    out_path.parent.mkdir(parents=True, exist_ok=True)
    n_rows = 0
    with out_path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "benchmark", "t", "metric", "mean", "std"])
        for s in series:
            for t, mean, std in zip(s["t"], s["mean"], s["std"]):
                mv = mean if isinstance(mean, float) else float("nan")
                sv = std if isinstance(std, float) else float("nan")
                writer.writerow(
                    [s["method"], s["benchmark"], _fmt(float(t)), s["metric"],
                     _fmt(mv), _fmt(sv)]
                )
                n_rows += 1
    print(f"wrote {n_rows} rows to {out_path}")

    if svg_dir is not None:
        _render_svgs(series, Path(svg_dir))
    return 0


def _render_svgs(series: list[dict], svg_dir: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    svg_dir.mkdir(parents=True, exist_ok=True)
    keys = sorted({(s["benchmark"], s["metric"]) for s in series})
    for benchmark, metric in keys:
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for s in series:
            if (s["benchmark"], s["metric"]) != (benchmark, metric):
                continue
            t = np.asarray(s["t"], dtype=float)
            mean = np.asarray([v if isinstance(v, float) else np.nan for v in s["mean"]])
            std = np.asarray([v if isinstance(v, float) else np.nan for v in s["std"]])
            ax.plot(t, mean, label=s["method"])
            ax.fill_between(t, mean - std, mean + std, alpha=0.2)
        ax.set_xlabel("iteration")
        ax.set_ylabel(metric)
        ax.set_title(benchmark)
        ax.legend(fontsize=8)
        fig.tight_layout()
        name = f"{benchmark.replace(',', '_')}__{metric}.svg"
        fig.savefig(svg_dir / name)
        plt.close(fig)


def _apply_config_file(cfg: ExperimentConfig, path: Path) -> None:
    if path.suffix == ".json":
        # a run manifest: re-execute the recorded configuration
        data = json.loads(path.read_text())
        recorded = data.get("config", data)
        fields = {f.name for f in dataclasses.fields(ExperimentConfig)}
        for key, value in recorded.items():
            if key not in fields:
                raise ValueError(f"{path}: unknown config key {key!r}")
            setattr(cfg, key, value)
        return
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise FileNotFoundError(path)
    fields = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    for section in parser.sections():
        for key, raw in parser.items(section):
            if key not in fields:
                raise ValueError(f"{path}: unknown config key {key!r} in [{section}]")
            setattr(cfg, key, _coerce(raw, fields[key].type, key))


def _coerce(raw: str, annotation: str, key: str):
    raw = raw.strip()
    if key == "seeds":
        return [int(v) for v in raw.split(",") if v.strip()]
    if "bool" in annotation:
        return raw.lower() in ("1", "true", "yes", "on")
    if "int" in annotation:
        return int(raw)
    if "float" in annotation:
        return float(raw)
    return raw


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path,
                   help="INI config file or a manifest.json (flags override it)")
    p.add_argument("--benchmark", help="benchmark name or tabular CSV path")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--selection-policy", choices=("uncertainty_max", "random"),
                   dest="selection_policy")
    p.add_argument("--iterations", type=int)
    p.add_argument("--repetitions", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--seeds", help="comma-separated explicit seeds")
    p.add_argument("--output")
    p.add_argument("--workers", type=int)
    p.add_argument("--timing", choices=("wall", "off"))
    p.add_argument("--initial-points", type=int, dest="initial_points")
    p.add_argument("--refit-every", type=int, dest="refit_every")
    p.add_argument("--noise-variance", type=float, dest="noise_variance")
    p.add_argument("--isotropic", action="store_const", const=True)
    p.add_argument("--cardinality-proxy", type=float, dest="cardinality_proxy")
    p.add_argument("--delta", type=float)
    p.add_argument("--ts-features", type=int, dest="ts_features")
    p.add_argument("--population-size", type=int, dest="population_size")
    p.add_argument("--evaluation-budget", type=int, dest="evaluation_budget")


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config is not None:
        _apply_config_file(cfg, args.config)
    for f in dataclasses.fields(ExperimentConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            if f.name == "seeds" and isinstance(val, str):
                val = [int(v) for v in val.split(",") if v.strip()]
            setattr(cfg, f.name, val)
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mobo", description="multi-objective Bayesian optimization harness"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute repeated optimization runs")
    _add_run_flags(p_run)

    p_timing = sub.add_parser("timing", help="acquisition-optimization timing study")
    _add_run_flags(p_timing)

    p_fronts = sub.add_parser("fronts", help="regenerate or verify a cached front")
    p_fronts.add_argument("benchmark")
    p_fronts.add_argument("--regenerate", action="store_true")

    p_plot = sub.add_parser("plotdata", help="merge summaries into plot-ready CSV")
    p_plot.add_argument("run_dirs", nargs="+", type=Path)
    p_plot.add_argument("--out", type=Path, default=Path("plotdata.csv"))
    p_plot.add_argument("--external", action="append", default=[],
                        help="NAME=path.csv with `iteration,phv_diff,r2` columns")
    p_plot.add_argument("--svg", type=Path, default=None,
                        help="directory for convenience SVG charts")

    sub.add_parser("list-benchmarks", help="print the registered benchmarks")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(_config_from_args(args))
        if args.command == "timing":
            return cmd_timing(_config_from_args(args))
        if args.command == "fronts":
            return cmd_fronts(args.benchmark, regenerate=args.regenerate)
        if args.command == "plotdata":
            external = []
            for item in args.external:
                name, _, path = item.partition("=")
                if not path:
                    raise ValueError("--external expects NAME=path.csv")
                external.append((name, Path(path)))
            return cmd_plotdata(args.run_dirs, args.out, external, args.svg)
        if args.command == "list-benchmarks":
            for name in benchmark_names():
                problem = make_benchmark(name)
                print(f"{name}: k={problem.k} d={problem.dim}")
            return 0
    except (ValueError, FileNotFoundError, FrontCacheMissing) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
