"""Multi-trip solutions, forward moment propagation, and chance feasibility.

A solution assigns every request to exactly one trip; trips chain on their
AMR, each departing the depot when the previous one returns.  Propagation
walks each chain forward: arrival = previous start-of-service + service +
travel (means and variances add), waiting censors the arrival against the
window opening, start-of-service = arrival + waiting.

Feasibility is chance-constrained: a trip's load stays within capacity, and
every leg arrives before its target's window close, each with configurable
confidence.  The checks evaluate the normal-CDF reformulations of those
probabilities; ``repair`` enforces them constructively by inserting depot
visits in front of the first request that would break one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .gauss import (
    DEGENERATE_VAR,
    NormalVar,
    expected_delay,
    expected_earliness,
    std_cdf,
    wait_mean_var,
)
from .solomon import StochasticInstance

#: Scalars closer than this are ties, resolved by (m, structure).
SCALAR_TIE = 1e-9


class StructureError(ValueError):
    """A solution or giant tour violates the structural invariants."""


class UnrepairableError(ValueError):
    """A request cannot be served even alone on a fresh AMR."""

    def __init__(self, request: int):
        super().__init__(f"request {request} is infeasible even alone on a fresh AMR")
        self.request = request


@dataclass(frozen=True)
class Trip:
    """One depot-to-depot request sequence."""

    requests: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.requests:
            raise StructureError("trip must serve at least one request")
        if len(set(self.requests)) != len(self.requests):
            raise StructureError(f"duplicate request within trip {self.requests}")


@dataclass(frozen=True)
class Solution:
    """Ordered AMRs, each an ordered chain of trips."""

    amrs: tuple[tuple[Trip, ...], ...]

    def __post_init__(self) -> None:
        for amr in self.amrs:
            if not amr:
                raise StructureError("every AMR must run at least one trip")

    @property
    def m(self) -> int:
        return len(self.amrs)

    def request_sequence(self) -> tuple[int, ...]:
        """All requests in visit order, depot markers dropped."""
        return tuple(r for amr in self.amrs for trip in amr for r in trip.requests)

    def structure_key(self) -> tuple:
        return tuple(tuple(trip.requests for trip in amr) for amr in self.amrs)

    def to_json_dict(self, objective: "Objective | None" = None) -> dict:
        doc: dict = {"amrs": [[list(trip.requests) for trip in amr] for amr in self.amrs]}
        if objective is not None:
            doc["objective"] = objective.to_json_dict()
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Solution":
        return cls(tuple(tuple(Trip(tuple(int(r) for r in trip)) for trip in amr)
                         for amr in doc["amrs"]))


@dataclass(frozen=True)
class Objective:
    f1: float       # fixed + expected-time operating cost
    f2: float       # total expected earliness (service-quality term)
    delay: float    # total expected delay
    scalar: float   # f1 + xi3 * delay: the search's comparison key
    m: int

    def to_json_dict(self) -> dict:
        return {"f1": self.f1, "f2": self.f2, "delay": self.delay,
                "scalar": self.scalar, "m": self.m}


@dataclass(frozen=True)
class VisitMoments:
    request: int
    arrival: NormalVar
    waiting: NormalVar
    start: NormalVar


@dataclass(frozen=True)
class TripTimeline:
    depart: NormalVar           # departure from the depot (after any turnaround wait)
    visits: tuple[VisitMoments, ...]
    return_arrival: NormalVar   # arrival back at the depot


@dataclass(frozen=True)
class TimeProfile:
    amrs: tuple[tuple[TripTimeline, ...], ...]


@dataclass(frozen=True)
class CapacityCheck:
    ok: bool
    margin: float   # attained probability minus the required confidence

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class LegMargin:
    tail: int       # node id the leg departs from (0 = depot)
    head: int       # node id whose window close is the target
    prob: float
    margin: float


@dataclass(frozen=True)
class TimeWindowCheck:
    ok: bool
    legs: tuple[LegMargin, ...]

    def __bool__(self) -> bool:
        return self.ok


def _chance(numer: float, var: float) -> float:
    """P(N(0, var) <= numer); deterministic boundary admitted at var == 0."""
    if var < DEGENERATE_VAR:
        return 1.0 if numer >= 0.0 else 0.0
    return std_cdf(numer / math.sqrt(var))


def validate_solution(inst: StochasticInstance, sol: Solution) -> None:
    """Every request exactly once; ids within 1..n."""
    seq = sol.request_sequence()
    n = inst.n
    seen = set()
    for r in seq:
        if not 1 <= r <= n:
            raise StructureError(f"request id {r} out of range 1..{n}")
        if r in seen:
            raise StructureError(f"request {r} served more than once")
        seen.add(r)
    if len(seen) != n:
        missing = sorted(set(range(1, n + 1)) - seen)
        raise StructureError(f"requests never served: {missing}")
    if n > 0 and not sol.amrs:
        raise StructureError("nonempty instance requires at least one AMR")


def propagate(inst: StochasticInstance, sol: Solution) -> TimeProfile:
    """Forward moments (arrival, waiting, start-of-service) for every visit.

    Trips chain through the depot: the next trip departs at the previous
    trip's return, censored against the depot's opening time.  The first
    trip of every AMR departs exactly at the depot ready time.
    """
    validate_solution(inst, sol)
    t_mu, t_var = inst.travel_mu, inst.travel_var
    s_mu, s_var = inst.service_mu, inst.service_var
    ready = inst.ready
    e0 = float(ready[0])
    amr_timelines = []
    for amr in sol.amrs:
        dep_mu, dep_var = e0, 0.0
        trips = []
        for trip in amr:
            depart = NormalVar(dep_mu, dep_var)
            prev = 0
            visits = []
            for j in trip.requests:
                a_mu = dep_mu + float(t_mu[prev, j])
                a_var = dep_var + float(t_var[prev, j])
                w_mu, w_var = wait_mean_var(a_mu, a_var, float(ready[j]))
                y_mu, y_var = a_mu + w_mu, a_var + w_var
                visits.append(VisitMoments(j, NormalVar(a_mu, a_var),
                                           NormalVar(w_mu, w_var), NormalVar(y_mu, y_var)))
                dep_mu = y_mu + float(s_mu[j])
                dep_var = y_var + float(s_var[j])
                prev = j
            r_mu = dep_mu + float(t_mu[prev, 0])
            r_var = dep_var + float(t_var[prev, 0])
            trips.append(TripTimeline(depart, tuple(visits), NormalVar(r_mu, r_var)))
            w0_mu, w0_var = wait_mean_var(r_mu, r_var, e0)
            dep_mu, dep_var = r_mu + w0_mu, r_var + w0_var
        amr_timelines.append(tuple(trips))
    return TimeProfile(tuple(amr_timelines))


def evaluate(inst: StochasticInstance, sol: Solution,
             profile: TimeProfile | None = None) -> Objective:
    """Cost f1, earliness f2, delay, and the scalarized search objective.

    f1 charges the fixed cost per AMR plus the expected travel, service and
    waiting time of every traversed arc; the scalar adds the delay penalty.
    """
    if profile is None:
        profile = propagate(inst, sol)
    t_mu = inst.travel_mu
    s_mu = inst.service_mu
    due = inst.due
    total_time = 0.0
    f2 = 0.0
    delay = 0.0
    for amr_tl in profile.amrs:
        prev_return = None
        for tl in amr_tl:
            if prev_return is not None:
                total_time += tl.depart.mu - prev_return.mu  # depot turnaround wait
            prev = 0
            for v in tl.visits:
                j = v.request
                total_time += float(t_mu[prev, j]) + v.waiting.mu + float(s_mu[j])
                h = float(due[j])
                f2 += expected_earliness(v.arrival, h)
                delay += expected_delay(v.arrival, h)
                prev = j
            total_time += float(t_mu[prev, 0])
            prev_return = tl.return_arrival
    m = len(profile.amrs)
    f1 = inst.xi1 * m + inst.xi2 * total_time
    return Objective(f1=f1, f2=f2, delay=delay, scalar=f1 + inst.xi3 * delay, m=m)


def capacity_chance_ok(inst: StochasticInstance, trip: Trip) -> CapacityCheck:
    """Whole-trip load within capacity at confidence 1 - eps1."""
    sum_mu = 0.0
    sum_var = 0.0
    for r in trip.requests:
        sum_mu += float(inst.demand_mu[r])
        sum_var += float(inst.demand_var[r])
    prob = _chance(inst.capacity - sum_mu, sum_var)
    need = 1.0 - inst.eps1
    return CapacityCheck(ok=prob >= need, margin=prob - need)


def prefix_capacity_chance_ok(inst: StochasticInstance, trip: Trip) -> bool:
    """Every served-prefix-plus-next-request load within capacity.

    Dominated by the whole-trip check whenever all variances are
    nonnegative, but kept as the literal per-arc reformulation.
    """
    need = 1.0 - inst.eps1
    sum_mu = 0.0
    sum_var = 0.0
    for j in trip.requests:
        prob = _chance(inst.capacity - float(inst.demand_mu[j]) - sum_mu,
                       float(inst.demand_var[j]) + sum_var)
        if prob < need:
            return False
        sum_mu += float(inst.demand_mu[j])
        sum_var += float(inst.demand_var[j])
    return True


def timewindow_chance_ok(inst: StochasticInstance, profile: TimeProfile) -> TimeWindowCheck:
    """Every leg arrives before its target's window close at confidence 1 - eps2.

    Legs cover depot departures, consecutive request pairs, and returns to
    the depot (whose close is the planning horizon).
    """
    t_mu, t_var = inst.travel_mu, inst.travel_var
    s_mu, s_var = inst.service_mu, inst.service_var
    due = inst.due
    h0 = float(due[0])
    need = 1.0 - inst.eps2
    legs = []
    ok = True
    for amr_tl in profile.amrs:
        for tl in amr_tl:
            dep_mu, dep_var = tl.depart.mu, tl.depart.var
            prev = 0
            for v in tl.visits:
                j = v.request
                prob = _chance(float(due[j]) - dep_mu - float(t_mu[prev, j]),
                               dep_var + float(t_var[prev, j]))
                legs.append(LegMargin(prev, j, prob, prob - need))
                ok = ok and prob >= need
                dep_mu = v.start.mu + float(s_mu[j])
                dep_var = v.start.var + float(s_var[j])
                prev = j
            prob = _chance(h0 - dep_mu - float(t_mu[prev, 0]),
                           dep_var + float(t_var[prev, 0]))
            legs.append(LegMargin(prev, 0, prob, prob - need))
            ok = ok and prob >= need
    return TimeWindowCheck(ok=ok, legs=tuple(legs))


def is_feasible(inst: StochasticInstance, sol: Solution) -> bool:
    """Chance feasibility: capacity (whole trip and prefixes) and all legs."""
    try:
        validate_solution(inst, sol)
    except StructureError:
        return False
    for amr in sol.amrs:
        for trip in amr:
            if not capacity_chance_ok(inst, trip):
                return False
            if not prefix_capacity_chance_ok(inst, trip):
                return False
    return bool(timewindow_chance_ok(inst, propagate(inst, sol)))


class _RepairScan:
    """Left-to-right chance-feasible construction state for one giant tour."""

    __slots__ = ("inst", "e0", "h0", "need_cap", "need_tw", "amrs", "cur_amr",
                 "cur_trip", "dep_mu", "dep_var", "sum_mu", "sum_var", "prev")

    def __init__(self, inst: StochasticInstance):
        self.inst = inst
        self.e0 = float(inst.ready[0])
        self.h0 = float(inst.due[0])
        self.need_cap = 1.0 - inst.eps1
        self.need_tw = 1.0 - inst.eps2
        self.amrs: list[tuple[Trip, ...]] = []
        self.cur_amr: list[Trip] = []
        self.cur_trip: list[int] = []
        self.dep_mu, self.dep_var = self.e0, 0.0
        self.sum_mu = self.sum_var = 0.0
        self.prev = 0

    def try_serve(self, j: int) -> bool:
        """Append j to the current trip if all three chance checks pass."""
        inst = self.inst
        nm = self.sum_mu + float(inst.demand_mu[j])
        nv = self.sum_var + float(inst.demand_var[j])
        if _chance(inst.capacity - nm, nv) < self.need_cap:
            return False
        a_mu = self.dep_mu + float(inst.travel_mu[self.prev, j])
        a_var = self.dep_var + float(inst.travel_var[self.prev, j])
        if _chance(float(inst.due[j]) - a_mu, a_var) < self.need_tw:
            return False
        w_mu, w_var = wait_mean_var(a_mu, a_var, float(inst.ready[j]))
        d_mu = a_mu + w_mu + float(inst.service_mu[j])
        d_var = a_var + w_var + float(inst.service_var[j])
        if _chance(self.h0 - d_mu - float(inst.travel_mu[j, 0]),
                   d_var + float(inst.travel_var[j, 0])) < self.need_tw:
            return False
        self.cur_trip.append(j)
        self.dep_mu, self.dep_var = d_mu, d_var
        self.sum_mu, self.sum_var = nm, nv
        self.prev = j
        return True

    def close_trip(self) -> None:
        """End the current trip at the depot; next departure is the turnaround."""
        inst = self.inst
        r_mu = self.dep_mu + float(inst.travel_mu[self.prev, 0])
        r_var = self.dep_var + float(inst.travel_var[self.prev, 0])
        self.cur_amr.append(Trip(tuple(self.cur_trip)))
        self.cur_trip = []
        w_mu, w_var = wait_mean_var(r_mu, r_var, self.e0)
        self.dep_mu, self.dep_var = r_mu + w_mu, r_var + w_var
        self.sum_mu = self.sum_var = 0.0
        self.prev = 0

    def close_amr(self) -> None:
        if self.cur_trip:
            self.close_trip()
        if self.cur_amr:
            self.amrs.append(tuple(self.cur_amr))
        self.cur_amr = []
        self.dep_mu, self.dep_var = self.e0, 0.0
        self.sum_mu = self.sum_var = 0.0
        self.prev = 0


def repair(inst: StochasticInstance, giant: Sequence[int]) -> Solution:
    """Decode a giant tour into a chance-feasible multi-trip solution.

    Scans left to right; the first request that would violate a capacity or
    time-window chance check closes the trip (a depot visit is inserted
    before it).  The next trip stays on the same AMR while the AMR can still
    chance-feasibly serve it and return by the horizon, otherwise a new AMR
    opens.  Raises UnrepairableError if a request fails even alone on a
    fresh AMR.
    """
    seen = set()
    for r in giant:
        if not 1 <= r <= inst.n:
            raise StructureError(f"request id {r} out of range 1..{inst.n}")
        if r in seen:
            raise StructureError(f"request {r} repeated in giant tour")
        seen.add(r)
    scan = _RepairScan(inst)
    for j in giant:
        if scan.try_serve(j):
            continue
        if scan.cur_trip:
            scan.close_trip()
            if scan.try_serve(j):
                continue
        scan.close_amr()
        if not scan.try_serve(j):
            raise UnrepairableError(j)
    scan.close_amr()
    return Solution(tuple(scan.amrs))


def is_improvement(cand_obj: Objective, cand_sol: Solution,
                   inc_obj: Objective, inc_sol: Solution) -> bool:
    """Strict betterness under the scalar with deterministic tie-breaking.

    Ties within SCALAR_TIE prefer fewer AMRs, then the lexicographically
    smaller trip structure.
    """
    if cand_obj.scalar < inc_obj.scalar - SCALAR_TIE:
        return True
    if cand_obj.scalar > inc_obj.scalar + SCALAR_TIE:
        return False
    if cand_obj.m != inc_obj.m:
        return cand_obj.m < inc_obj.m
    return cand_sol.structure_key() < inc_sol.structure_key()
