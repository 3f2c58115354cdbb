"""Harness behavior: run outputs, determinism, plot data, front commands."""

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from mobo.cli import (
    ExperimentConfig,
    cmd_plotdata,
    cmd_run,
    cmd_timing,
    main,
)


def tiny_config(**kw):
    base = dict(
        benchmark="BC-2,2",
        method="mobo-ei",
        iterations=2,
        repetitions=2,
        seed=3,
        initial_points=5,
        population_size=12,
        evaluation_budget=60,
        timing="off",
    )
    base.update(kw)
    return ExperimentConfig(**base)


def read_rows(path: Path):
    with path.open() as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestCmdRun:
    def test_emits_csvs_summary_manifest(self, tmp_path):
        cfg = tiny_config(output=str(tmp_path))
        assert cmd_run(cfg) == 0
        out = tmp_path / "BC-2_2__mobo-ei"
        csvs = sorted(out.glob("rep*.csv"))
        assert len(csvs) == 2
        assert (out / "summary.json").exists()
        assert (out / "manifest.json").exists()

    def test_csv_header_contract(self, tmp_path):
        cfg = tiny_config(output=str(tmp_path))
        cmd_run(cfg)
        header, rows = read_rows(next((tmp_path / "BC-2_2__mobo-ei").glob("rep*.csv")))
        assert header == [
            "t", "x1", "x2", "f1", "f2",
            "phv_diff", "log10_phv_diff", "r2", "regret", "acq_time_s",
        ]
        assert len(rows) == 2

    def test_zero_iterations_header_only(self, tmp_path):
        cfg = tiny_config(output=str(tmp_path), iterations=0, repetitions=1)
        cmd_run(cfg)
        header, rows = read_rows(next((tmp_path / "BC-2_2__mobo-ei").glob("rep*.csv")))
        assert rows == []

    def test_byte_identical_reruns(self, tmp_path):
        cfg_a = tiny_config(output=str(tmp_path / "a"))
        cfg_b = tiny_config(output=str(tmp_path / "b"))
        cmd_run(cfg_a)
        cmd_run(cfg_b)
        for name in ("rep00_seed3.csv", "rep01_seed4.csv", "summary.json"):
            a = (tmp_path / "a" / "BC-2_2__mobo-ei" / name).read_bytes()
            b = (tmp_path / "b" / "BC-2_2__mobo-ei" / name).read_bytes()
            assert a == b, name

    def test_wall_timing_identical_except_time_column(self, tmp_path):
        cfg_a = tiny_config(output=str(tmp_path / "a"), timing="wall")
        cfg_b = tiny_config(output=str(tmp_path / "b"), timing="wall")
        cmd_run(cfg_a)
        cmd_run(cfg_b)
        ha, rows_a = read_rows(tmp_path / "a" / "BC-2_2__mobo-ei" / "rep00_seed3.csv")
        hb, rows_b = read_rows(tmp_path / "b" / "BC-2_2__mobo-ei" / "rep00_seed3.csv")
        drop = ha.index("acq_time_s")
        for ra, rb in zip(rows_a, rows_b):
            assert ra[:drop] == rb[:drop]
            assert float(ra[drop]) > 0

    def test_budget_accounting(self, tmp_path):
        cfg = tiny_config(output=str(tmp_path), iterations=4, repetitions=1)
        cmd_run(cfg)
        manifest = json.loads(
            (tmp_path / "BC-2_2__mobo-ei" / "manifest.json").read_text()
        )
        assert manifest["evaluations_per_run"] == 4 + manifest["initial_points"]

    def test_every_method_runs(self, tmp_path):
        for method in ("mobo-ts", "mobo-lcb", "parego", "random-search"):
            cfg = tiny_config(
                output=str(tmp_path / method), method=method, repetitions=1,
                ts_features=64,
            )
            assert cmd_run(cfg) == 0

    def test_explicit_seeds_must_match_repetitions(self):
        cfg = tiny_config(seeds=[1, 2, 3])
        with pytest.raises(ValueError, match="repetitions"):
            cfg.validate()

    def test_invalid_method_reported(self):
        with pytest.raises(ValueError, match="method"):
            tiny_config(method="simulated-annealing").validate()

    def test_workers_parallel_matches_sequential(self, tmp_path):
        seq = tiny_config(output=str(tmp_path / "seq"), workers=1)
        par = tiny_config(output=str(tmp_path / "par"), workers=2)
        cmd_run(seq)
        cmd_run(par)
        a = (tmp_path / "seq" / "BC-2_2__mobo-ei" / "rep01_seed4.csv").read_bytes()
        b = (tmp_path / "par" / "BC-2_2__mobo-ei" / "rep01_seed4.csv").read_bytes()
        assert a == b

    def test_tabular_benchmark_runs(self, tmp_path):
        table = tmp_path / "data.csv"
        rng = np.random.default_rng(0)
        lines = ["x1,x2,f1,f2"]
        for i in range(30):
            x = rng.random(2)
            lines.append(f"{x[0]},{x[1]},{x.sum()},{(1 - x).sum()}")
        table.write_text("\n".join(lines) + "\n")
        cfg = tiny_config(benchmark=str(table), output=str(tmp_path / "out"),
                          repetitions=1)
        assert cmd_run(cfg) == 0
        out = tmp_path / "out" / "data__mobo-ei"
        header, rows = read_rows(next(out.glob("rep*.csv")))
        # selected inputs are snapped onto dataset rows
        for row in rows:
            x = np.array([float(row[1]), float(row[2])])
            assert any(np.allclose(x, r) for r in np.loadtxt(
                table, delimiter=",", skiprows=1)[:, :2])


class TestSummary:
    def test_mean_recomputes_from_runs(self, tmp_path):
        cfg = tiny_config(output=str(tmp_path), repetitions=3, iterations=3)
        cmd_run(cfg)
        out = tmp_path / "BC-2_2__mobo-ei"
        summary = json.loads((out / "summary.json").read_text())
        per_run = []
        for path in sorted(out.glob("rep*.csv")):
            header, rows = read_rows(path)
            col = header.index("phv_diff")
            per_run.append([float(r[col]) for r in rows])
        recomputed = np.mean(np.array(per_run), axis=0)
        np.testing.assert_allclose(summary["metrics"]["phv_diff"]["mean"], recomputed)


class TestCmdTiming:
    def test_single_row_output(self, tmp_path, capsys):
        cfg = tiny_config(timing="wall", repetitions=2, iterations=2)
        assert cmd_timing(cfg) == 0
        lines = [l for l in capsys.readouterr().out.splitlines() if l.strip()]
        assert len(lines) == 1
        assert "BC-2,2" in lines[0] and "mobo-ei" in lines[0] and "±" in lines[0]

    def test_requires_wall_mode(self):
        with pytest.raises(ValueError, match="wall"):
            cmd_timing(tiny_config(timing="off"))


class TestCmdFronts:
    def test_zdt1_analytic_report(self, capsys):
        assert main(["fronts", "ZDT1"]) == 0
        out = capsys.readouterr().out
        assert "analytic front" in out and "hypervolume" in out

    def test_cached_verification(self, capsys):
        assert main(["fronts", "BC-2,2"]) == 0
        assert "verified" in capsys.readouterr().out

    def test_unknown_benchmark_exit_code(self, capsys):
        assert main(["fronts", "nope"]) == 2

    def test_corrupted_cache_detected(self, tmp_path, monkeypatch, capsys):
        import shutil

        import mobo.benchmarks as bm

        src = bm.front_cache_dir()
        work = tmp_path / "fronts"
        shutil.copytree(src, work)
        # inject a dominated point without touching the manifest
        path = work / "BC-2_2.csv"
        path.write_text(path.read_text() + "1e9,1e9\n")
        monkeypatch.setattr(bm, "front_cache_dir", lambda: work)
        with pytest.raises(RuntimeError, match="checksum|dominated"):
            bm.verify_front_cache("BC-2,2")


class TestPlotdata:
    def _run_two_methods(self, tmp_path):
        dirs = []
        for method in ("mobo-ei", "random-search"):
            cfg = tiny_config(output=str(tmp_path), method=method, repetitions=1)
            cmd_run(cfg)
            dirs.append(tmp_path / f"BC-2_2__{method}")
        return dirs

    def test_two_methods_merge(self, tmp_path):
        dirs = self._run_two_methods(tmp_path)
        out = tmp_path / "plot.csv"
        assert cmd_plotdata(dirs, out) == 0
        header, rows = read_rows(out)
        assert header == ["method", "benchmark", "t", "metric", "mean", "std"]
        methods = {r[0] for r in rows if r[3] == "phv_diff"}
        assert methods == {"mobo-ei", "random-search"}

    def test_external_series_included(self, tmp_path):
        dirs = self._run_two_methods(tmp_path)
        ext = tmp_path / "other.csv"
        ext.write_text("iteration,phv_diff,r2\n1,5.0,2.0\n2,4.0,1.5\n")
        out = tmp_path / "plot.csv"
        cmd_plotdata(dirs, out, external=[("published", ext)])
        _, rows = read_rows(out)
        assert {r[0] for r in rows} >= {"published"}

    def test_mean_column_matches_summary(self, tmp_path):
        dirs = self._run_two_methods(tmp_path)
        out = tmp_path / "plot.csv"
        cmd_plotdata(dirs, out)
        summary = json.loads((dirs[0] / "summary.json").read_text())
        _, rows = read_rows(out)
        got = [
            float(r[4])
            for r in rows
            if r[0] == "mobo-ei" and r[3] == "phv_diff"
        ]
        expected = summary["metrics"]["phv_diff"]["mean"]
        np.testing.assert_allclose(got, expected)

    def test_missing_summary_reports_directory(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="summary"):
            cmd_plotdata([tmp_path], tmp_path / "x.csv")

    def test_svg_rendering(self, tmp_path):
        dirs = self._run_two_methods(tmp_path)
        svg_dir = tmp_path / "svg"
        cmd_plotdata(dirs, tmp_path / "plot.csv", svg_dir=svg_dir)
        assert list(svg_dir.glob("*.svg"))


class TestMainEntry:
    def test_list_benchmarks(self, capsys):
        assert main(["list-benchmarks"]) == 0
        out = capsys.readouterr().out
        assert "BC-2,2: k=2 d=2" in out
        assert "PRDZPS-6,6: k=6 d=6" in out

    def test_run_via_argv_with_config_file(self, tmp_path, capsys):
        ini = tmp_path / "exp.ini"
        ini.write_text(
            "[experiment]\n"
            "benchmark = BC-2,2\n"
            "method = random-search\n"
            "iterations = 2\n"
            "repetitions = 1\n"
            "initial_points = 5\n"
            "timing = off\n"
            f"output = {tmp_path / 'out'}\n"
        )
        assert main(["run", "--config", str(ini), "--seed", "5"]) == 0
        out = tmp_path / "out" / "BC-2_2__random-search"
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["seed"] == 5
        assert manifest["config"]["method"] == "random-search"

    def test_env_var_overrides_output_root(self, tmp_path, monkeypatch):
        monkeypatch.setenv("MOBO_OUTPUT_ROOT", str(tmp_path / "env_root"))
        cfg = tiny_config(repetitions=1)
        cmd_run(cfg)
        assert (tmp_path / "env_root" / "BC-2_2__mobo-ei").exists()

    def test_rerun_from_manifest_reproduces_summary(self, tmp_path):
        cfg = tiny_config(output=str(tmp_path / "a"))
        cmd_run(cfg)
        manifest = tmp_path / "a" / "BC-2_2__mobo-ei" / "manifest.json"
        assert main(["run", "--config", str(manifest),
                     "--output", str(tmp_path / "b")]) == 0
        a = (tmp_path / "a" / "BC-2_2__mobo-ei" / "summary.json").read_bytes()
        b = (tmp_path / "b" / "BC-2_2__mobo-ei" / "summary.json").read_bytes()
        assert a == b

    def test_midrun_failure_flushes_partial_logs(self, tmp_path, monkeypatch):
        import mobo.cli as cli

        original = cli.execute_single_run
        calls = {"n": 0}

        def flaky(cfg, seed):
            calls["n"] += 1
            if calls["n"] == 2:
                raise RuntimeError("synthetic evaluator crash")
            return original(cfg, seed)

        monkeypatch.setattr(cli, "execute_single_run", flaky)
        cfg = tiny_config(output=str(tmp_path), repetitions=3)
        assert cmd_run(cfg) == 1
        out = tmp_path / "BC-2_2__mobo-ei"
        assert len(list(out.glob("rep*.csv"))) == 1  # first repetition flushed
        assert not (out / "summary.json").exists()

    def test_bad_flag_value_is_usage_error(self, capsys):
        assert main(["run", "--method", "mobo-ei", "--benchmark", "missing.csv"]) == 2
        assert "error" in capsys.readouterr().err
