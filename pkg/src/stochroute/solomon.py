"""Solomon-format instance parsing and stochastic augmentation.

A plain VRPTW instance (capacity, depot window, customer table) is read from
the standard Solomon text layout and then augmented into a stochastic
instance: Gaussian demands, a Gaussian travel-time matrix proportional to
Euclidean distance, and demand-linear service times.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .gauss import NormalVar


class ParseError(ValueError):
    """Malformed Solomon input; message carries the offending line number."""


@dataclass(frozen=True)
class Customer:
    id: int
    x: float
    y: float
    demand: float
    ready: float
    due: float
    service: float


@dataclass(frozen=True)
class Depot:
    x: float
    y: float
    ready: float
    due: float


@dataclass(frozen=True)
class SolomonInstance:
    name: str
    vehicle_capacity: float
    depot: Depot
    customers: tuple[Customer, ...]

    def __post_init__(self) -> None:
        if self.vehicle_capacity <= 0:
            raise ValueError("capacity must be positive")
        ids = [c.id for c in self.customers]
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError("customer ids must be contiguous 1..n")
        for c in self.customers:
            if c.ready > c.due:
                raise ValueError(f"inverted window on customer {c.id}")
            if c.demand < 0:
                raise ValueError(f"negative demand on customer {c.id}")
        if self.depot.ready > self.depot.due:
            raise ValueError("inverted depot window")

    @property
    def n(self) -> int:
        return len(self.customers)

    def first(self, n: int) -> "SolomonInstance":
        """The sub-instance on the first ``n`` customers."""
        if not 0 <= n <= self.n:
            raise ValueError(f"first-n must be in 0..{self.n}, got {n}")
        return replace(self, name=f"{self.name}-{n}", customers=self.customers[:n])


def parse_solomon(text: str) -> SolomonInstance:
    """Parse the standard Solomon layout.

    Name line, VEHICLE header with a number/capacity row, CUSTOMER table with
    seven numeric columns; table row with id 0 is the depot.
    """
    lines = text.splitlines()
    name = None
    capacity = None
    rows: list[tuple[int, list[float]]] = []
    section = "name"
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        upper = line.upper()
        if name is None:
            name = line
            continue
        if upper.startswith("VEHICLE"):
            section = "vehicle"
            continue
        if upper.startswith("CUSTOMER"):
            section = "customer"
            continue
        fields = line.split()
        try:
            float(fields[0])
        except ValueError:
            # column-header lines (NUMBER/CAPACITY, CUST NO. ...)
            continue
        try:
            values = [float(tok) for tok in fields]
        except ValueError:
            raise ParseError(f"non-numeric field at line {lineno}") from None
        if section == "vehicle":
            if len(values) != 2:
                raise ParseError(f"malformed vehicle row at line {lineno}")
            capacity = values[1]
            section = "after-vehicle"
        elif section == "customer":
            if len(values) != 7:
                raise ParseError(f"expected 7 customer columns at line {lineno}")
            rows.append((lineno, values))
        else:
            raise ParseError(f"unexpected data at line {lineno}")
    if name is None:
        raise ParseError("empty input: missing name line")
    if capacity is None:
        raise ParseError("missing VEHICLE capacity header")
    if not rows or rows[0][1][0] != 0:
        raise ParseError("customer table must start with depot row 0")

    depot_line, d = rows[0]
    depot = Depot(x=d[1], y=d[2], ready=d[4], due=d[5])
    if depot.ready > depot.due:
        raise ParseError(f"window inverted at line {depot_line}")

    customers = []
    seen = set()
    for lineno, v in rows[1:]:
        cid = int(v[0])
        if v[0] != cid:
            raise ParseError(f"non-integer customer id at line {lineno}")
        if cid in seen:
            raise ParseError(f"duplicate customer id {cid} at line {lineno}")
        seen.add(cid)
        if v[4] > v[5]:
            raise ParseError(f"window inverted at line {lineno}")
        if v[3] < 0:
            raise ParseError(f"negative demand at line {lineno}")
        customers.append(
            Customer(id=cid, x=v[1], y=v[2], demand=v[3], ready=v[4], due=v[5], service=v[6])
        )
    expected = list(range(1, len(customers) + 1))
    if [c.id for c in customers] != expected:
        raise ParseError("customer ids are not contiguous 1..n")
    if capacity <= 0:
        raise ParseError("capacity must be positive")
    return SolomonInstance(name=name, vehicle_capacity=capacity, depot=depot,
                           customers=tuple(customers))


def load_solomon(path) -> SolomonInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_solomon(fh.read())


@dataclass(frozen=True)
class AugmentConfig:
    """Knobs turning a deterministic instance into a stochastic one."""

    speed_factor: float = 1.0          # time units per distance unit
    demand_var_ratio: float = 0.1      # var(q) = ratio * mean(q)
    travel_var_ratio: float = 0.2      # var(T) = ratio * mean(T)
    service_slope: float = 2.0         # S = slope * q + bias
    service_bias: float = 10.0
    xi1: float = 1000.0                # fixed cost per AMR
    xi2: float = 1.0                   # cost per expected time unit
    xi3: float = 1.0                   # penalty per expected delay unit
    eps1: float = 0.05                 # capacity chance level
    eps2: float = 0.05                 # time-window chance level

    def __post_init__(self) -> None:
        if self.speed_factor <= 0:
            raise ValueError("speed_factor must be positive")
        if self.demand_var_ratio < 0 or self.travel_var_ratio < 0:
            raise ValueError("variance ratios must be >= 0")
        for name in ("eps1", "eps2"):
            eps = getattr(self, name)
            if not 0.0 < eps <= 0.5:
                raise ValueError(f"{name} must be in (0, 0.5], got {eps}")
        if not self.xi1 > self.xi2:
            raise ValueError("xi1 must exceed xi2")


@dataclass(frozen=True, eq=False)
class StochasticInstance:
    """Augmented instance: everything route evaluation needs, precomputed.

    The vectors ``ready``/``due``/``demand_mu`` etc. are indexed by node id
    (0 = depot, 1..n = requests) and frozen read-only.
    """

    base: SolomonInstance
    speed_factor: float
    demand_var_ratio: float
    travel_var_ratio: float
    service_slope: float
    service_bias: float
    xi1: float
    xi2: float
    xi3: float
    eps1: float
    eps2: float
    travel_mu: np.ndarray = field(repr=False)
    travel_var: np.ndarray = field(repr=False)
    demand_mu: np.ndarray = field(repr=False)
    demand_var: np.ndarray = field(repr=False)
    service_mu: np.ndarray = field(repr=False)
    service_var: np.ndarray = field(repr=False)
    ready: np.ndarray = field(repr=False)
    due: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def capacity(self) -> float:
        return self.base.vehicle_capacity

    @property
    def name(self) -> str:
        return self.base.name

    def demand(self, i: int) -> NormalVar:
        return NormalVar(float(self.demand_mu[i]), float(self.demand_var[i]))

    def service(self, i: int) -> NormalVar:
        return NormalVar(float(self.service_mu[i]), float(self.service_var[i]))

    def travel(self, i: int, j: int) -> NormalVar:
        return NormalVar(float(self.travel_mu[i, j]), float(self.travel_var[i, j]))

    def with_confidence(self, eps1: float | None = None, eps2: float | None = None) -> "StochasticInstance":
        """Same instance under different chance levels (sensitivity sweeps)."""
        cfg = AugmentConfig(
            speed_factor=self.speed_factor,
            demand_var_ratio=self.demand_var_ratio,
            travel_var_ratio=self.travel_var_ratio,
            service_slope=self.service_slope,
            service_bias=self.service_bias,
            xi1=self.xi1, xi2=self.xi2, xi3=self.xi3,
            eps1=self.eps1 if eps1 is None else eps1,
            eps2=self.eps2 if eps2 is None else eps2,
        )
        return replace(self, eps1=cfg.eps1, eps2=cfg.eps2)

    def to_json_dict(self) -> dict:
        base = self.base
        return {
            "base": {
                "name": base.name,
                "vehicle_capacity": base.vehicle_capacity,
                "depot": {"x": base.depot.x, "y": base.depot.y,
                          "ready": base.depot.ready, "due": base.depot.due},
                "customers": [
                    {"id": c.id, "x": c.x, "y": c.y, "demand": c.demand,
                     "ready": c.ready, "due": c.due, "service": c.service}
                    for c in base.customers
                ],
            },
            "demand": [{"mu": float(self.demand_mu[i]), "var": float(self.demand_var[i])}
                       for i in range(1, self.n + 1)],
            "travel": [[{"mu": float(self.travel_mu[i, j]), "var": float(self.travel_var[i, j])}
                        for j in range(self.n + 1)] for i in range(self.n + 1)],
            "service_slope": self.service_slope,
            "service_bias": self.service_bias,
            "xi1": self.xi1, "xi2": self.xi2, "xi3": self.xi3,
            "eps1": self.eps1, "eps2": self.eps2,
            "speed_factor": self.speed_factor,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)


def augment(base: SolomonInstance, cfg: AugmentConfig | None = None) -> StochasticInstance:
    """Attach Gaussian demand/travel/service structure to a Solomon instance.

    Mean travel time is Euclidean distance times the speed factor; variances
    are the configured ratios of the means; service is slope*q + bias, hence
    itself Gaussian with mean slope*mu_q + bias and variance slope^2*var_q.
    """
    cfg = cfg or AugmentConfig()
    n = base.n
    xs = np.array([base.depot.x] + [c.x for c in base.customers], dtype=float)
    ys = np.array([base.depot.y] + [c.y for c in base.customers], dtype=float)
    dx = xs[:, None] - xs[None, :]
    dy = ys[:, None] - ys[None, :]
    dist = np.hypot(dx, dy)
    travel_mu = dist * cfg.speed_factor
    np.fill_diagonal(travel_mu, 0.0)
    travel_var = cfg.travel_var_ratio * travel_mu

    demand_mu = np.array([0.0] + [c.demand for c in base.customers], dtype=float)
    demand_var = cfg.demand_var_ratio * demand_mu
    service_mu = cfg.service_slope * demand_mu + cfg.service_bias
    service_mu[0] = 0.0  # the depot has no service
    service_var = cfg.service_slope ** 2 * demand_var
    service_var[0] = 0.0

    ready = np.array([base.depot.ready] + [c.ready for c in base.customers], dtype=float)
    due = np.array([base.depot.due] + [c.due for c in base.customers], dtype=float)

    for arr in (travel_mu, travel_var, demand_mu, demand_var,
                service_mu, service_var, ready, due):
        arr.setflags(write=False)

    return StochasticInstance(
        base=base,
        speed_factor=cfg.speed_factor,
        demand_var_ratio=cfg.demand_var_ratio,
        travel_var_ratio=cfg.travel_var_ratio,
        service_slope=cfg.service_slope,
        service_bias=cfg.service_bias,
        xi1=cfg.xi1, xi2=cfg.xi2, xi3=cfg.xi3,
        eps1=cfg.eps1, eps2=cfg.eps2,
        travel_mu=travel_mu, travel_var=travel_var,
        demand_mu=demand_mu, demand_var=demand_var,
        service_mu=service_mu, service_var=service_var,
        ready=ready, due=due,
    )
