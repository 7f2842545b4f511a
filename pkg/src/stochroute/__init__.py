"""Chance-constrained multi-trip robot routing under Gaussian uncertainty.

Parse a Solomon-format instance, augment it with the stochastic structure,
and either call :func:`run_pts` directly or use the estimator front ends:

    >>> from stochroute import datasets, augment, PTSSolver
    >>> inst = augment(datasets.load("C101", first_n=25))
    >>> solver = PTSSolver(seed=1).fit(inst)
    >>> solver.objective_.scalar  # doctest: +SKIP
"""

from . import datasets
from .construct import Clustering, ConstructParams, build_initial, greedy_insert, kmeans
from .estimators import InitialBuilder, PTSSolver, check_instance
from .gauss import (
    NormalVar,
    NumericalInstabilityError,
    expected_delay,
    expected_earliness,
    std_cdf,
    std_pdf,
    waiting_moments,
)
from .model import (
    Objective,
    Solution,
    StructureError,
    TimeProfile,
    Trip,
    UnrepairableError,
    capacity_chance_ok,
    evaluate,
    is_feasible,
    prefix_capacity_chance_ok,
    propagate,
    repair,
    timewindow_chance_ok,
)
from .oracle import InfeasibleInstanceError, SimReport, exhaustive, gen_tiny, simulate
from .search import (
    Chromosome,
    PTSResult,
    SearchParams,
    crossover,
    decode,
    encode,
    mutate,
    relocate,
    run_pts,
    two_opt,
)
from .solomon import (
    AugmentConfig,
    ParseError,
    SolomonInstance,
    StochasticInstance,
    augment,
    load_solomon,
    parse_solomon,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentConfig", "Chromosome", "Clustering", "ConstructParams",
    "InfeasibleInstanceError", "InitialBuilder", "NormalVar",
    "NumericalInstabilityError", "Objective", "PTSResult", "PTSSolver",
    "ParseError", "SearchParams", "SimReport", "Solution", "SolomonInstance",
    "StochasticInstance", "StructureError", "TimeProfile", "Trip",
    "UnrepairableError", "augment", "build_initial", "capacity_chance_ok",
    "check_instance", "crossover", "datasets", "decode", "encode", "evaluate",
    "exhaustive", "expected_delay", "expected_earliness", "gen_tiny",
    "greedy_insert", "is_feasible", "kmeans", "load_solomon", "mutate",
    "parse_solomon", "prefix_capacity_chance_ok", "propagate", "relocate",
    "repair", "run_pts", "simulate", "std_cdf", "std_pdf",
    "timewindow_chance_ok", "two_opt", "waiting_moments",
]
