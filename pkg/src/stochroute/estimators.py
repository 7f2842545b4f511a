"""Estimator-style front ends so solvers compose with the sklearn ecosystem.

Both classes follow the fit/get_params contract: construction only stores
hyperparameters, ``fit(instance)`` runs the algorithm and exposes results as
trailing-underscore attributes, and ``score`` returns a larger-is-better
value (the negated scalar objective) so model-selection utilities can rank
parameter settings.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .construct import ConstructParams, METHODS, build_initial
from .model import evaluate
from .search import SearchParams, run_pts
from .solomon import StochasticInstance


def check_instance(instance) -> StochasticInstance:
    """Validate the fit input; raises TypeError for foreign objects."""
    if not isinstance(instance, StochasticInstance):
        raise TypeError(
            f"expected a StochasticInstance, got {type(instance).__name__};"
            " parse a Solomon file and call augment() first")
    return instance


class PTSSolver(BaseEstimator):
    """Population-based tabu search solver with ablation modes.

    Parameters mirror the tuned defaults; ``mode`` selects the full search
    ("pts"), tabu-only ("ts"), or population-only ("ga").
    """

    def __init__(self, iterations=50, population=120, crossover_prob=0.7,
                 mutation_prob=0.15, fill_ratio=1.0, tenure=7, candidates=40,
                 weight_refresh=10, mode="pts", k=None, kmeans_iter=30,
                 kmeans_tau=0.0002, kmeans_restarts=5, seed=0):
        self.iterations = iterations
        self.population = population
        self.crossover_prob = crossover_prob
        self.mutation_prob = mutation_prob
        self.fill_ratio = fill_ratio
        self.tenure = tenure
        self.candidates = candidates
        self.weight_refresh = weight_refresh
        self.mode = mode
        self.k = k
        self.kmeans_iter = kmeans_iter
        self.kmeans_tau = kmeans_tau
        self.kmeans_restarts = kmeans_restarts
        self.seed = seed

    def _params(self) -> SearchParams:
        return SearchParams(
            iterations=self.iterations,
            population=self.population,
            crossover_prob=self.crossover_prob,
            mutation_prob=self.mutation_prob,
            fill_ratio=self.fill_ratio,
            tenure=self.tenure,
            candidates=self.candidates,
            weight_refresh=self.weight_refresh,
            mode=self.mode,
            construct=ConstructParams(k=self.k, kiter=self.kmeans_iter,
                                      tau=self.kmeans_tau,
                                      restarts=self.kmeans_restarts),
        )

    def fit(self, instance, y=None):
        instance = check_instance(instance)
        result = run_pts(instance, self._params(), seed=self.seed)
        self.best_solution_ = result.best_solution
        self.objective_ = result.best_objective
        self.trace_ = result.trace
        self.initial_solution_ = result.initial_solution
        self.initial_objective_ = result.initial_objective
        self.n_amrs_ = result.best_objective.m
        return self

    def score(self, instance=None, y=None) -> float:
        if not hasattr(self, "objective_"):
            raise NotFittedError("call fit(instance) first")
        return -self.objective_.scalar


class InitialBuilder(BaseEstimator):
    """Construction-only estimator: gk, kmeans-only, or greedy insertion."""

    def __init__(self, method="gk", k=None, kmeans_iter=30, kmeans_tau=0.0002,
                 kmeans_restarts=5, seed=0):
        self.method = method
        self.k = k
        self.kmeans_iter = kmeans_iter
        self.kmeans_tau = kmeans_tau
        self.kmeans_restarts = kmeans_restarts
        self.seed = seed

    def fit(self, instance, y=None):
        instance = check_instance(instance)
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        params = ConstructParams(k=self.k, kiter=self.kmeans_iter,
                                 tau=self.kmeans_tau, restarts=self.kmeans_restarts)
        self.solution_ = build_initial(instance, params, rng=self.seed,
                                       method=self.method)
        self.objective_ = evaluate(instance, self.solution_)
        self.n_amrs_ = self.objective_.m
        return self

    def score(self, instance=None, y=None) -> float:
        if not hasattr(self, "objective_"):
            raise NotFittedError("call fit(instance) first")
        return -self.objective_.scalar
