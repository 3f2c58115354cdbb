# Benchmark-harness workflow: run three methods on the same problem, merge
# their summaries into plot-ready data, and render an SVG. The same flow is
# available from the shell:
#
#   mobo run --benchmark BC-2,2 --method mobo-ei --iterations 40 --repetitions 3
#   mobo run --benchmark BC-2,2 --method parego --iterations 40 --repetitions 3
#   mobo plotdata results/BC-2_2__mobo-ei results/BC-2_2__parego --out plot.csv
#
# Run: python demos/05_compare_methods.py   (writes into demo_results/)

from pathlib import Path

from mobo.cli import ExperimentConfig, cmd_plotdata, cmd_run

OUT = Path("demo_results")

run_dirs = []
for method in ("mobo-ei", "parego", "random-search"):
    cfg = ExperimentConfig(
        benchmark="BC-2,2",
        method=method,
        iterations=40,
        repetitions=3,
        seed=0,
        output=str(OUT),
        timing="off",
    )
    cmd_run(cfg)
    run_dirs.append(OUT / f"BC-2_2__{method}")

cmd_plotdata(run_dirs, OUT / "plotdata.csv", svg_dir=OUT / "charts")
print("\nlong-format rows -> demo_results/plotdata.csv")
print("charts           -> demo_results/charts/*.svg")
