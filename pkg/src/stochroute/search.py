"""Population-based tabu search over giant-tour chromosomes.

The search permutes a depot-free giant tour; decoding is the depot-insertion
repair, so every candidate it ever ranks is feasible.  Each iteration runs
one tabu neighborhood step (roulette-selected 2-opt or relocation over a
sampled candidate set, with aspiration past the tabu matrices) and then a
population phase seeded from the incumbent (crossover, two mutation kinds,
dedup, repair).  Tabu-only and population-only ablations share the loop.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .construct import ConstructParams, build_initial
from .model import Objective, Solution, evaluate, is_improvement, repair
from .solomon import StochasticInstance

MODES = ("pts", "ts", "ga")

Chromosome = tuple[int, ...]

OP_TWO_OPT = 1
OP_RELOCATE = 2
_OP_NAMES = {OP_TWO_OPT: "two_opt", OP_RELOCATE: "relocate"}


@dataclass(frozen=True)
class SearchParams:
    iterations: int = 50            # tuned optimum: maximum iteration count
    population: int = 120           # tuned optimum: population size
    crossover_prob: float = 0.7     # tuned optimum
    mutation_prob: float = 0.15     # tuned optimum
    fill_ratio: float = 1.0         # population share filled from the incumbent
    tenure: int = 7
    candidates: int = 40            # sampled (j1, j2) pairs per tabu step
    weight_refresh: int = 10        # renormalize operator weights this often
    mode: str = "pts"
    construct: ConstructParams = field(default_factory=ConstructParams)

    def __post_init__(self) -> None:
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.population < 2:
            raise ValueError("population must be >= 2")
        for name in ("crossover_prob", "mutation_prob", "fill_ratio"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.tenure < 1:
            raise ValueError("tenure must be >= 1")
        if self.candidates < 1:
            raise ValueError("candidates must be >= 1")
        if self.weight_refresh < 1:
            raise ValueError("weight_refresh must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


def encode(sol: Solution) -> Chromosome:
    """Giant tour of a solution: trips concatenated, depot markers dropped."""
    return sol.request_sequence()


def decode(inst: StochasticInstance, chrom: Chromosome) -> Solution:
    """Depot-insertion repair; feasible by construction."""
    return repair(inst, chrom)


def two_opt(chrom: Chromosome, j1: int, j2: int) -> Chromosome:
    """Reverse the segment between the positions of j1 and j2, inclusive."""
    if j1 == j2:
        raise ValueError("two_opt needs two distinct requests")
    a, b = chrom.index(j1), chrom.index(j2)
    if a > b:
        a, b = b, a
    return chrom[:a] + tuple(reversed(chrom[a:b + 1])) + chrom[b + 1:]


def relocate(chrom: Chromosome, j1: int, j2: int) -> Chromosome:
    """Remove j1 and reinsert it immediately before j2."""
    if j1 == j2:
        raise ValueError("relocate needs two distinct requests")
    without = [r for r in chrom if r != j1]
    at = without.index(j2)
    return tuple(without[:at]) + (j1,) + tuple(without[at:])


def crossover(parent1: Chromosome, parent2: Chromosome,
              rng: random.Random) -> tuple[Chromosome, Chromosome]:
    """Fragment-prepend crossover.

    A random contiguous fragment of each parent is placed in front of the
    other parent; duplicates are deleted keeping the first occurrence, so
    both children remain permutations.
    """
    def fragment(parent: Chromosome) -> Chromosome:
        a = rng.randrange(len(parent))
        b = rng.randrange(len(parent))
        if a > b:
            a, b = b, a
        return parent[a:b + 1]

    def dedup(seq: tuple[int, ...]) -> Chromosome:
        seen = set()
        out = []
        for r in seq:
            if r not in seen:
                seen.add(r)
                out.append(r)
        return tuple(out)

    frag1, frag2 = fragment(parent1), fragment(parent2)
    return dedup(frag2 + parent1), dedup(frag1 + parent2)


def mutate(chrom: Chromosome, rng: random.Random) -> Chromosome:
    """Equal-probability arc swap (exchange two disjoint segments) or node swap."""
    n = len(chrom)
    if n < 2:
        return chrom
    if n >= 4 and rng.random() < 0.5:
        a, b, c, d = sorted(rng.sample(range(n), 4))
        return (chrom[:a] + chrom[c:d + 1] + chrom[b + 1:c]
                + chrom[a:b + 1] + chrom[d + 1:])
    i, j = rng.sample(range(n), 2)
    out = list(chrom)
    out[i], out[j] = out[j], out[i]
    return tuple(out)


@dataclass
class OperatorWeights:
    p1: float = 50.0
    p2: float = 50.0

    def select(self, rng: random.Random) -> int:
        return OP_TWO_OPT if rng.random() * (self.p1 + self.p2) < self.p1 else OP_RELOCATE

    def reward(self, op: int, amount: float) -> None:
        if op == OP_TWO_OPT:
            self.p1 += amount
        else:
            self.p2 += amount

    def renormalize(self) -> None:
        """Scale back to a sum of 100, preserving the ratio."""
        total = self.p1 + self.p2
        self.p1 = 100.0 * self.p1 / total
        self.p2 = 100.0 * self.p2 / total


class TabuState:
    """Two symmetric (n+1)x(n+1) tenure matrices, one per operator."""

    def __init__(self, n: int, tenure: int):
        self.tenure = tenure
        self.matrices = {
            OP_TWO_OPT: np.zeros((n + 1, n + 1), dtype=np.int32),
            OP_RELOCATE: np.zeros((n + 1, n + 1), dtype=np.int32),
        }

    def decrement(self) -> None:
        for b in self.matrices.values():
            np.subtract(b, 1, out=b, where=b > 0)

    def is_tabu(self, op: int, j1: int, j2: int) -> bool:
        return bool(self.matrices[op][j1, j2] > 0)

    def mark(self, op: int, j1: int, j2: int) -> None:
        b = self.matrices[op]
        b[j1, j2] = self.tenure
        b[j2, j1] = self.tenure

    def is_symmetric(self) -> bool:
        return all((b == b.T).all() for b in self.matrices.values())


@dataclass(frozen=True)
class Candidate:
    chrom: Chromosome
    sol: Solution
    obj: Objective

    def beats(self, other: "Candidate") -> bool:
        return is_improvement(self.obj, self.sol, other.obj, other.sol)


@dataclass
class SearchState:
    incumbent: Candidate
    current: Candidate
    tabu: TabuState
    weights: OperatorWeights


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    incumbent_scalar: float
    current_scalar: float
    operator: str
    weights_p1: float
    weights_p2: float


@dataclass(frozen=True)
class PTSResult:
    best_solution: Solution
    best_objective: Objective
    trace: tuple[TraceRow, ...]
    initial_solution: Solution
    initial_objective: Objective


def _candidate(inst: StochasticInstance, chrom: Chromosome) -> Candidate:
    sol = repair(inst, chrom)
    return Candidate(chrom, sol, evaluate(inst, sol))


def neighborhood_step(inst: StochasticInstance, state: SearchState,
                      rng: random.Random, n_candidates: int) -> int:
    """One tabu iteration: sample moves, pick the best admissible, update.

    Tabu moves are admissible only when they beat the incumbent (aspiration);
    if every sampled move is tabu and none aspirates, the best tabu move is
    taken anyway.  The chosen move's pair becomes tabu for ``tenure``
    iterations and the operator is rewarded +5 on an incumbent improvement,
    +2 otherwise.
    """
    state.tabu.decrement()
    op = state.weights.select(rng)
    move = two_opt if op == OP_TWO_OPT else relocate
    ids = state.current.chrom
    best_adm: tuple[Candidate, int, int] | None = None
    best_any: tuple[Candidate, int, int] | None = None
    for _ in range(n_candidates):
        j1, j2 = rng.sample(ids, 2)
        cand = _candidate(inst, move(state.current.chrom, j1, j2))
        if best_any is None or cand.beats(best_any[0]):
            best_any = (cand, j1, j2)
        if state.tabu.is_tabu(op, j1, j2) and not cand.beats(state.incumbent):
            continue
        if best_adm is None or cand.beats(best_adm[0]):
            best_adm = (cand, j1, j2)
    chosen, j1, j2 = best_adm if best_adm is not None else best_any
    state.current = chosen
    if chosen.beats(state.incumbent):
        state.incumbent = chosen
        state.weights.reward(op, 5.0)
    else:
        state.weights.reward(op, 2.0)
    state.tabu.mark(op, j1, j2)
    return op


def _population_phase(inst: StochasticInstance, state: SearchState,
                      params: SearchParams, rng: random.Random) -> None:
    """Refill from the incumbent, recombine, mutate, dedup, repair, adopt best."""
    n = inst.n
    pop: list[Chromosome] = [state.incumbent.chrom] * round(params.fill_ratio * params.population)
    base = list(range(1, n + 1))
    while len(pop) < params.population:
        perm = base[:]
        rng.shuffle(perm)
        pop.append(tuple(perm))
    if n >= 2 and rng.random() < params.crossover_prob:
        rng.shuffle(pop)
        crossed: list[Chromosome] = []
        for i in range(0, len(pop) - 1, 2):
            c1, c2 = crossover(pop[i], pop[i + 1], rng)
            crossed.append(c1)
            crossed.append(c2)
        if len(pop) % 2:
            crossed.append(pop[-1])
        pop = crossed
    if n >= 2 and rng.random() < params.mutation_prob:
        pop = [mutate(c, rng) for c in pop]
    seen: set[Chromosome] = set()
    best: Candidate | None = None
    for chrom in pop:
        if chrom in seen:
            continue
        seen.add(chrom)
        cand = _candidate(inst, chrom)
        if best is None or cand.beats(best):
            best = cand
    state.current = best
    if best.beats(state.incumbent):
        state.incumbent = best


def run_pts(inst: StochasticInstance, params: SearchParams | None = None,
            seed: int = 0) -> PTSResult:
    """Full search: construct, then iterate tabu and population phases.

    ``ts`` mode disables the population phase, ``ga`` mode the tabu step.
    Identical (instance, params, seed) reproduce the identical trace.
    """
    params = params or SearchParams()
    rng = random.Random(seed)
    init_sol = build_initial(inst, params.construct, rng=rng, method="gk")
    init = Candidate(encode(init_sol), init_sol, evaluate(inst, init_sol))
    state = SearchState(
        incumbent=init,
        current=init,
        tabu=TabuState(inst.n, params.tenure),
        weights=OperatorWeights(),
    )
    trace: list[TraceRow] = []
    run_tabu = params.mode in ("pts", "ts") and inst.n >= 2
    run_population = params.mode in ("pts", "ga") and inst.n >= 1
    for ite in range(params.iterations):
        op_name = "-"
        if run_tabu:
            op = neighborhood_step(inst, state, rng, params.candidates)
            op_name = _OP_NAMES[op]
            if (ite + 1) % params.weight_refresh == 0:
                state.weights.renormalize()
        if run_population:
            _population_phase(inst, state, params, rng)
        trace.append(TraceRow(ite, state.incumbent.obj.scalar, state.current.obj.scalar,
                              op_name, state.weights.p1, state.weights.p2))
    return PTSResult(
        best_solution=state.incumbent.sol,
        best_objective=state.incumbent.obj,
        trace=tuple(trace),
        initial_solution=init_sol,
        initial_objective=init.obj,
    )


def trace_to_csv(trace: tuple[TraceRow, ...]) -> str:
    lines = ["iteration,incumbent_scalar,current_scalar,operator,weights_p1,weights_p2"]
    for row in trace:
        lines.append(f"{row.iteration},{row.incumbent_scalar!r},{row.current_scalar!r},"
                     f"{row.operator},{row.weights_p1!r},{row.weights_p2!r}")
    return "\n".join(lines) + "\n"
