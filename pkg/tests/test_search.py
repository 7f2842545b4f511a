import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochroute.datasets import load
from stochroute.model import Solution, Trip, evaluate, is_feasible
from stochroute.search import (
    OP_RELOCATE,
    OP_TWO_OPT,
    Candidate,
    OperatorWeights,
    SearchParams,
    SearchState,
    TabuState,
    crossover,
    decode,
    encode,
    mutate,
    neighborhood_step,
    relocate,
    run_pts,
    trace_to_csv,
    two_opt,
)
from stochroute.solomon import augment

from .conftest import build_instance


class ScriptedRng:
    """Feeds predetermined values to rng-consuming operators."""

    def __init__(self, randranges=(), samples=(), randoms=()):
        self._randranges = list(randranges)
        self._samples = list(samples)
        self._randoms = list(randoms)

    def randrange(self, *args):
        return self._randranges.pop(0)

    def sample(self, seq, k):
        return self._samples.pop(0)

    def random(self):
        return self._randoms.pop(0)


perms = st.permutations(list(range(1, 9)))


class TestEncodeDecode:
    def test_encode_concatenates(self):
        sol = Solution(((Trip((1, 2)), Trip((3,))), (Trip((4,)),)))
        assert encode(sol) == (1, 2, 3, 4)

    def test_single_trip(self):
        assert encode(Solution(((Trip((3, 1, 2)),),))) == (3, 1, 2)

    def test_roundtrip_idempotent(self):
        inst = augment(load("C101", first_n=15))
        rng = random.Random(0)
        ids = list(range(1, 16))
        for _ in range(25):
            rng.shuffle(ids)
            chrom = tuple(ids)
            sol = decode(inst, chrom)
            assert encode(sol) == chrom
            assert encode(decode(inst, encode(sol))) == encode(sol)


class TestTwoOpt:
    def test_segment_reversal(self):
        assert two_opt((6, 4, 2, 5, 1, 3), 4, 1) == (6, 1, 5, 2, 4, 3)

    def test_adjacent_pair_swaps(self):
        assert two_opt((1, 2, 3), 1, 2) == (2, 1, 3)

    def test_involution(self):
        chrom = (5, 3, 1, 4, 2)
        assert two_opt(two_opt(chrom, 3, 2), 3, 2) == chrom

    def test_argument_order_irrelevant(self):
        chrom = (6, 4, 2, 5, 1, 3)
        assert two_opt(chrom, 1, 4) == two_opt(chrom, 4, 1)

    def test_rejects_equal(self):
        with pytest.raises(ValueError):
            two_opt((1, 2), 1, 1)


class TestRelocate:
    def test_inserts_before_target(self):
        out = relocate((6, 4, 2, 5, 1, 3), 1, 4)
        assert out == (6, 1, 4, 2, 5, 3)
        assert out.index(1) + 1 == out.index(4)

    def test_identity_if_already_before(self):
        chrom = (1, 4, 2, 3)
        assert relocate(chrom, 1, 4) == chrom

    @given(perms, st.data())
    @settings(max_examples=100, deadline=None)
    def test_preserves_multiset(self, perm, data):
        chrom = tuple(perm)
        j1 = data.draw(st.sampled_from(chrom))
        j2 = data.draw(st.sampled_from([x for x in chrom if x != j1]))
        out = relocate(chrom, j1, j2)
        assert sorted(out) == sorted(chrom)
        assert len(out) == len(chrom)


class TestCrossover:
    def test_fragment_prepend_rule(self):
        p1 = (6, 4, 2, 5, 1, 3)
        p2 = (5, 6, 1, 3, 4, 2)
        # fragments (4,2,5) from p1 (indices 1..3) and (1,3,4) from p2 (2..4)
        rng = ScriptedRng(randranges=[1, 3, 2, 4])
        c1, c2 = crossover(p1, p2, rng)
        assert c1 == (1, 3, 4, 6, 2, 5)
        assert c2 == (4, 2, 5, 6, 1, 3)

    def test_prefix_fragment_returns_parent(self):
        p = (3, 1, 4, 2)
        rng = ScriptedRng(randranges=[0, 1, 0, 3])
        c1, c2 = crossover(p, p, rng)
        assert c2 == p          # fragment (3,1) is a prefix of p
        assert c1 == p          # fragment = whole parent

    @given(perms, perms, st.integers(0, 2**31))
    @settings(max_examples=200, deadline=None)
    def test_children_are_permutations(self, p1, p2, seed):
        c1, c2 = crossover(tuple(p1), tuple(p2), random.Random(seed))
        assert sorted(c1) == sorted(p1)
        assert sorted(c2) == sorted(p2)


class TestMutate:
    def test_arc_swap_example(self):
        rng = ScriptedRng(randoms=[0.0], samples=[[0, 2, 4, 5]])
        assert mutate((6, 4, 2, 5, 1, 3), rng) == (1, 3, 5, 6, 4, 2)

    def test_node_swap_example(self):
        chrom = (6, 4, 2, 5, 1, 3)
        rng = ScriptedRng(randoms=[0.9], samples=[[4, 1]])
        out = mutate(chrom, rng)
        assert out == (6, 1, 2, 5, 4, 3)

    @given(perms, st.integers(0, 2**31))
    @settings(max_examples=200, deadline=None)
    def test_preserves_multiset(self, perm, seed):
        chrom = tuple(perm)
        out = mutate(chrom, random.Random(seed))
        assert sorted(out) == sorted(chrom)

    def test_short_chromosomes(self):
        assert mutate((1,), random.Random(0)) == (1,)
        out = mutate((1, 2), random.Random(0))
        assert sorted(out) == [1, 2]


class TestTabuState:
    def test_mark_is_symmetric(self):
        tabu = TabuState(5, tenure=3)
        tabu.mark(OP_TWO_OPT, 2, 4)
        assert tabu.is_tabu(OP_TWO_OPT, 4, 2)
        assert not tabu.is_tabu(OP_RELOCATE, 2, 4)
        assert tabu.is_symmetric()

    def test_tenure_countdown(self):
        tabu = TabuState(5, tenure=3)
        tabu.mark(OP_RELOCATE, 1, 2)
        for _ in range(2):
            tabu.decrement()
            assert tabu.is_tabu(OP_RELOCATE, 1, 2)
        tabu.decrement()
        assert not tabu.is_tabu(OP_RELOCATE, 1, 2)

    def test_decrement_floors_at_zero(self):
        tabu = TabuState(3, tenure=1)
        for _ in range(4):
            tabu.decrement()
        assert (tabu.matrices[OP_TWO_OPT] == 0).all()


class TestOperatorWeights:
    def test_selection_by_threshold(self):
        w = OperatorWeights(p1=50.0, p2=50.0)
        assert w.select(ScriptedRng(randoms=[0.49])) == OP_TWO_OPT
        assert w.select(ScriptedRng(randoms=[0.51])) == OP_RELOCATE

    def test_renormalize_preserves_ratio(self):
        w = OperatorWeights(p1=75.0, p2=25.0)
        w.reward(OP_TWO_OPT, 5.0)
        w.renormalize()
        assert w.p1 + w.p2 == pytest.approx(100.0)
        assert w.p1 / w.p2 == pytest.approx(80.0 / 25.0)


class TestNeighborhoodStep:
    def _state(self, inst, seed=0):
        sol = decode(inst, tuple(range(1, inst.n + 1)))
        cand = Candidate(encode(sol), sol, evaluate(inst, sol))
        return SearchState(incumbent=cand, current=cand,
                           tabu=TabuState(inst.n, tenure=3),
                           weights=OperatorWeights())

    def test_invariants_over_steps(self):
        inst = augment(load("R101", first_n=12))
        state = self._state(inst)
        rng = random.Random(1)
        last_inc = state.incumbent.obj.scalar
        total_weight = 100.0
        for _ in range(30):
            op = neighborhood_step(inst, state, rng, n_candidates=10)
            assert op in (OP_TWO_OPT, OP_RELOCATE)
            assert state.incumbent.obj.scalar <= last_inc + 1e-9
            last_inc = state.incumbent.obj.scalar
            assert state.tabu.is_symmetric()
            new_total = state.weights.p1 + state.weights.p2
            assert new_total - total_weight in (2.0, 5.0)
            total_weight = new_total
            assert is_feasible(inst, state.current.sol)

    def test_chosen_move_becomes_tabu(self):
        inst = augment(load("C101", first_n=10))
        state = self._state(inst)
        rng = random.Random(3)
        neighborhood_step(inst, state, rng, n_candidates=5)
        marked = sum(int((b > 0).sum()) for b in state.tabu.matrices.values())
        assert marked == 2  # one pair, stored symmetrically


class TestRunPTS:
    def test_deterministic_trace(self):
        inst = augment(load("RC102", first_n=12))
        p = SearchParams(iterations=8, population=20)
        a = run_pts(inst, p, seed=4)
        b = run_pts(inst, p, seed=4)
        assert a.trace == b.trace
        assert a.best_solution == b.best_solution

    def test_incumbent_nonincreasing_and_bounded_by_initial(self):
        inst = augment(load("C102", first_n=15))
        res = run_pts(inst, SearchParams(iterations=12, population=24), seed=2)
        scalars = [row.incumbent_scalar for row in res.trace]
        assert all(a >= b - 1e-9 for a, b in zip(scalars, scalars[1:]))
        assert res.best_objective.scalar <= res.initial_objective.scalar + 1e-9
        assert is_feasible(inst, res.best_solution)

    def test_modes_run_and_shape_trace(self):
        inst = augment(load("R102", first_n=10))
        for mode in ("pts", "ts", "ga"):
            res = run_pts(inst, SearchParams(iterations=5, population=12, mode=mode), seed=0)
            assert len(res.trace) == 5
            if mode == "ga":
                assert all(r.operator == "-" for r in res.trace)
            else:
                assert all(r.operator in ("two_opt", "relocate") for r in res.trace)

    def test_weight_refresh_renormalizes(self):
        inst = augment(load("R101", first_n=10))
        res = run_pts(inst, SearchParams(iterations=10, population=12, mode="ts",
                                         weight_refresh=10), seed=1)
        last = res.trace[-1]
        assert last.weights_p1 + last.weights_p2 == pytest.approx(100.0)

    def test_single_request_instance(self):
        inst = build_instance([(10.0, 0.0)], [10.0], [(0.0, 500.0)])
        res = run_pts(inst, SearchParams(iterations=3, population=4), seed=0)
        assert res.best_solution.request_sequence() == (1,)

    def test_trace_csv_schema(self):
        inst = augment(load("C101", first_n=8))
        res = run_pts(inst, SearchParams(iterations=3, population=6), seed=0)
        text = trace_to_csv(res.trace)
        header = text.splitlines()[0]
        assert header == "iteration,incumbent_scalar,current_scalar,operator,weights_p1,weights_p2"
        assert len(text.splitlines()) == 4

    def test_params_validation(self):
        with pytest.raises(ValueError):
            SearchParams(mode="annealing")
        with pytest.raises(ValueError):
            SearchParams(population=1)
        with pytest.raises(ValueError):
            SearchParams(crossover_prob=1.5)
        with pytest.raises(ValueError):
            SearchParams(tenure=0)


def test_scalar_invariant_under_chromosome_roundtrip():
    # repair-decoded solutions evaluate identically after encode/decode
    inst = augment(load("RC101", first_n=14))
    rng = random.Random(33)
    ids = list(range(1, 15))
    for _ in range(20):
        rng.shuffle(ids)
        sol = decode(inst, tuple(ids))
        again = decode(inst, encode(sol))
        assert again == sol
        assert evaluate(inst, again) == evaluate(inst, sol)


def test_all_tabu_falls_back_to_best_candidate():
    # when every sampled move is tabu and none beats the incumbent, the
    # best tabu move is still taken as the new current solution
    inst = augment(load("C102", first_n=8))
    sol = decode(inst, tuple(range(1, 9)))
    cand = Candidate(encode(sol), sol, evaluate(inst, sol))
    state = SearchState(incumbent=cand, current=cand,
                        tabu=TabuState(inst.n, tenure=50),
                        weights=OperatorWeights())
    for op in state.tabu.matrices:
        state.tabu.matrices[op][:] = 50
    before = state.current
    neighborhood_step(inst, state, random.Random(0), n_candidates=6)
    assert state.current is not before
    assert state.incumbent.obj.scalar <= before.obj.scalar + 1e-9
