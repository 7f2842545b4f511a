"""Initial-solution construction: k-means clusters plus greedy insertion.

The combined builder ("gk") clusters request locations, orders each cluster
by window opening, concatenates clusters by their earliest opening, and
repairs the resulting giant tour into a feasible solution.  The two ablation
variants keep one ingredient each: "kmeans" clusters but skips the window
ordering, "greedy" orders globally but skips clustering.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable

from .model import Solution, repair
from .solomon import StochasticInstance

METHODS = ("gk", "kmeans", "greedy")


@dataclass(frozen=True)
class Clustering:
    k: int
    centroids: tuple[tuple[float, float], ...]
    assignment: tuple[int, ...]     # cluster index per request, in id order 1..n
    rss: float

    def members(self, cluster: int) -> tuple[int, ...]:
        return tuple(i + 1 for i, c in enumerate(self.assignment) if c == cluster)


@dataclass(frozen=True)
class ConstructParams:
    k: int | None = None       # None: one cluster per expected trip load
    kiter: int = 30
    tau: float = 0.0002
    restarts: int = 5

    def __post_init__(self) -> None:
        if self.kiter < 1:
            raise ValueError("kiter must be >= 1")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


def default_k(inst: StochasticInstance) -> int:
    """One cluster per expected trip: ceil(total mean demand / 0.9 capacity)."""
    total = float(inst.demand_mu[1:].sum())
    k = math.ceil(total / (0.9 * inst.capacity))
    return max(1, min(inst.n, k))


def _lloyd(points: list[tuple[float, float]], seeds: list[int],
           kiter: int, tau: float) -> tuple[list[tuple[float, float]], list[int], float]:
    k = len(seeds)
    centroids = [points[s] for s in seeds]
    assignment = [0] * len(points)
    rss = math.inf
    for _ in range(kiter):
        for i, (x, y) in enumerate(points):
            best, best_d = 0, math.inf
            for c, (cx, cy) in enumerate(centroids):
                d = (x - cx) ** 2 + (y - cy) ** 2
                if d < best_d:
                    best, best_d = c, d
            assignment[i] = best
        sums = [[0.0, 0.0, 0] for _ in range(k)]
        for i, (x, y) in enumerate(points):
            s = sums[assignment[i]]
            s[0] += x
            s[1] += y
            s[2] += 1
        centroids = [
            (s[0] / s[2], s[1] / s[2]) if s[2] else centroids[c]
            for c, s in enumerate(sums)
        ]
        rss = sum((x - centroids[assignment[i]][0]) ** 2 +
                  (y - centroids[assignment[i]][1]) ** 2
                  for i, (x, y) in enumerate(points))
        if rss < 1.0 / tau:
            break
    return centroids, assignment, rss


def kmeans(inst: StochasticInstance, k: int, kiter: int = 30, tau: float = 0.0002,
           rng: random.Random | int | None = None, restarts: int = 5) -> Clustering:
    """Best-of-restarts Lloyd clustering seeded from random request locations.

    Stops an iteration sweep when the squared-distance loss drops below
    1/tau or after ``kiter`` sweeps.
    """
    n = inst.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}, got {k}")
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    points = [(c.x, c.y) for c in inst.base.customers]
    best = None
    for _ in range(restarts):
        seeds = rng.sample(range(n), k)
        centroids, assignment, rss = _lloyd(points, seeds, kiter, tau)
        if best is None or rss < best[2]:
            best = (centroids, assignment, rss)
    centroids, assignment, rss = best
    return Clustering(k=k, centroids=tuple(centroids), assignment=tuple(assignment),
                      rss=rss)


def greedy_insert(inst: StochasticInstance, cluster: Iterable[int]) -> list[int]:
    """Order a request set by ascending window opening (ties: close, then id)."""
    members = list(cluster)
    if not members:
        raise ValueError("cluster must be nonempty")
    return sorted(members, key=lambda r: (float(inst.ready[r]), float(inst.due[r]), r))


def _cluster_order(inst: StochasticInstance, clustering: Clustering) -> list[tuple[int, ...]]:
    groups = [clustering.members(c) for c in range(clustering.k)]
    return [g for g in groups if g]


def build_initial(inst: StochasticInstance, params: ConstructParams | None = None,
                  rng: random.Random | int | None = None,
                  method: str = "gk") -> Solution:
    """Construct a feasible starting solution.

    gk: cluster, order each cluster by window opening, concatenate clusters
    by earliest opening, repair.  kmeans: clusters in draw order, members in
    id order.  greedy: global window-opening order, no clustering.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    params = params or ConstructParams()
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    if inst.n == 0:
        return Solution(())
    if method == "greedy":
        giant = greedy_insert(inst, range(1, inst.n + 1))
        return repair(inst, giant)
    k = params.k if params.k is not None else default_k(inst)
    k = max(1, min(inst.n, k))
    clustering = kmeans(inst, k, kiter=params.kiter, tau=params.tau, rng=rng,
                        restarts=params.restarts)
    groups = _cluster_order(inst, clustering)
    if method == "gk":
        subroutes = [greedy_insert(inst, g) for g in groups]
        subroutes.sort(key=lambda route: (float(inst.ready[route[0]]),
                                          float(inst.due[route[0]]), route[0]))
    else:  # kmeans-only: member id order, clusters in draw order
        subroutes = [sorted(g) for g in groups]
    giant = [r for route in subroutes for r in route]
    return repair(inst, giant)
