"""Streaming submodular maximization under multiple knapsack budgets.

One pass over the element stream, one candidate set per threshold of a
sliding geometric grid, provable constant-factor approximation, plus
certified optimum bounds, offline baselines, and two recommendation
pipelines (reading lists, citation networks).

The hot per-element loop has a compiled core (``sievestream._kernel``) used
automatically for array-backed objectives; everything falls back to the
pure-Python engine when the extension is unavailable.
"""

from .baselines import (
    biased_pagerank,
    brute_force_opt,
    greedy_cardinality,
    greedy_knapsack,
    pagerank_recommend,
)
from .bounds import BoundReport, offline_bound, online_bound
from .decomposable import (
    DecomposableObjective,
    required_sample_size,
    reservoir_sample,
    two_pass_decomposable,
)
from .knapsack import (
    BigElementHit,
    KnapsackInstance,
    StandardizedInstance,
    classify_big_element,
    is_feasible,
    standardize,
)
from .objectives import (
    CoverageObjective,
    Objective,
    PropertyReport,
    check_monotone_submodular,
    evaluate,
    make_coverage_objective,
    make_modular_objective,
    marginal_gain,
)
from .solvers import (
    HAVE_KERNEL,
    SolveMetrics,
    build_threshold_grid,
    simple_stream_cardinality,
    stream_dknapsack,
    stream_m_known,
    stream_opt_known,
    two_pass_exact_m,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "HAVE_KERNEL",
    "Objective",
    "CoverageObjective",
    "PropertyReport",
    "evaluate",
    "marginal_gain",
    "make_coverage_objective",
    "make_modular_objective",
    "check_monotone_submodular",
    "KnapsackInstance",
    "StandardizedInstance",
    "BigElementHit",
    "standardize",
    "is_feasible",
    "classify_big_element",
    "SolveMetrics",
    "build_threshold_grid",
    "simple_stream_cardinality",
    "stream_opt_known",
    "stream_m_known",
    "stream_dknapsack",
    "two_pass_exact_m",
    "BoundReport",
    "offline_bound",
    "online_bound",
    "brute_force_opt",
    "greedy_cardinality",
    "greedy_knapsack",
    "biased_pagerank",
    "pagerank_recommend",
    "DecomposableObjective",
    "required_sample_size",
    "reservoir_sample",
    "two_pass_decomposable",
]
