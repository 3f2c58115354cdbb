"""Multi-objective Bayesian optimization toolkit.

GP surrogates per objective, a cheap inner multi-objective problem over
acquisition functions solved by NSGA-II, and uncertainty-volume selection
of the next expensive evaluation; plus ParEGO and random-search baselines,
hypervolume / average-distance metrics, and a synthetic benchmark suite
with a reproducible experiment harness (``mobo`` on the command line).
"""

__version__ = "0.1.0"

from .acquisition import (
    AcquisitionSpec,
    BetaSchedule,
    SamplePath,
    beta_t,
    draw_prior_path,
    draw_sample_path,
    ei,
    lcb,
    log_ei,
    ucb,
)
from .baselines import (
    ScalarizationWeights,
    parego_run,
    random_search_run,
    sample_weights,
    scalarize,
)
from .benchmarks import (
    BenchmarkProblem,
    TabularProblem,
    benchmark_names,
    ideal_front_of,
    load_tabular,
    make_benchmark,
    reference_point_of,
)
from .core import (
    BoxDomain,
    Evaluation,
    EvaluationLog,
    ParetoArchive,
    archive_insert,
    dominates,
    pareto_filter,
)
from .gp import GpModel, Posterior, SeKernelParams, fit, posterior, predict, refit_hyperparameters
from .metrics import hypervolume, phv_difference, r2_distance, regret
from .nsga2 import Nsga2Config, crowding_distance, fast_nondominated_sort, solve
from .optimizer import (
    OptimizerConfig,
    OptimizerState,
    RunRecord,
    run,
    select_next,
    step,
    uncertainty_volume,
)

__all__ = [
    "__version__",
    "AcquisitionSpec",
    "BetaSchedule",
    "BenchmarkProblem",
    "BoxDomain",
    "Evaluation",
    "EvaluationLog",
    "GpModel",
    "Nsga2Config",
    "OptimizerConfig",
    "OptimizerState",
    "ParetoArchive",
    "Posterior",
    "RunRecord",
    "SamplePath",
    "ScalarizationWeights",
    "SeKernelParams",
    "TabularProblem",
    "archive_insert",
    "benchmark_names",
    "beta_t",
    "crowding_distance",
    "dominates",
    "draw_prior_path",
    "draw_sample_path",
    "ei",
    "fast_nondominated_sort",
    "fit",
    "hypervolume",
    "ideal_front_of",
    "lcb",
    "load_tabular",
    "log_ei",
    "make_benchmark",
    "parego_run",
    "pareto_filter",
    "phv_difference",
    "posterior",
    "predict",
    "r2_distance",
    "random_search_run",
    "reference_point_of",
    "refit_hyperparameters",
    "regret",
    "run",
    "sample_weights",
    "scalarize",
    "select_next",
    "solve",
    "step",
    "ucb",
    "uncertainty_volume",
]
