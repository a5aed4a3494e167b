from fractions import Fraction
from itertools import product

import pytest

from emcs import (
    EMCS,
    BridgeRule,
    CostModel,
    DistanceModel,
    EvolvingContext,
    FactStore,
    ObservationContext,
    belief,
    belief_distance,
    check_strong,
    check_weak,
    enumerate_equilibria,
    enumerate_evolving_equilibria,
    global_cost,
    later,
    min_cost,
    min_cost_global,
    min_dist,
    min_eq,
    min_next,
    now,
    observed,
    select_strong,
    select_weak,
    step_cost,
    symdiff,
)
from emcs.evolution import next_ops
from emcs.testing import random_instance

E = frozenset()
P = frozenset({"p"})
Q = frozenset({"q"})
R = frozenset({"r"})


def self_support(*extra, costs=None):
    """add(r) <- (c:r) gives equilibria {} and {r}; ``extra`` rules hang off r."""
    ctx = EvolvingContext(
        FactStore({"p", "r", "x", "y"}),
        bridge_rules=[BridgeRule(now("add", "r"), [belief(0, "r")]), *extra],
        costs=costs or {"add": 1, "del": 1},
    )
    return EMCS([ctx])


def test_step_cost_examples(deferred_only_system):
    assert step_cost(deferred_only_system, (E,), (E,)) == 0
    assert step_cost(deferred_only_system, (E,), (Q,)) == 1
    assert step_cost(deferred_only_system, (E,), (Q,), CostModel(({"add": 5, "del": 0},))) == 5


def test_min_eq_strict_subset():
    M = self_support(BridgeRule(later("add", "p"), [belief(0, "r")]))
    assert min_eq(M, M.kbs, ()) == [(E,)]


def test_min_eq_incomparable():
    M = self_support(
        BridgeRule(later("add", "p"), [belief(0, "r")]),
        BridgeRule(later("del", "p"), [belief(0, "r", negated=True)]),
    )
    assert min_eq(M, M.kbs, ()) == [(E,), (R,)]


def test_min_eq_single():
    M = EMCS([EvolvingContext(FactStore({"p"}), kb={"p"})])
    assert min_eq(M, M.kbs, ()) == [(P,)]


def test_min_eq_needs_strictness_everywhere():
    # context 2 has identical deferred sets in both equilibria, so nothing is dominated
    c1 = EvolvingContext(
        FactStore({"r", "p"}),
        bridge_rules=[BridgeRule(now("add", "r"), [belief(0, "r")]), BridgeRule(later("add", "p"), [belief(0, "r")])],
    )
    c2 = EvolvingContext(FactStore({"z"}))
    M = EMCS([c1, c2])
    assert len(min_eq(M, M.kbs, ())) == 2
    assert len(min_cost(M, M.kbs, ())) == 1


def test_min_cost_examples():
    M = self_support(BridgeRule(later("add", "p"), [belief(0, "r")]), costs={"add": 2, "del": 1})
    assert [step_cost(M, S, ()) for S in [(E,), (R,)]] == [0, 2]
    assert min_cost(M, M.kbs, ()) == [(E,)]
    flat = self_support()
    assert min_cost(flat, flat.kbs, ()) == [(E,), (R,)]
    from emcs import AnswerSetLogic, rule

    dead = EMCS([EvolvingContext(AnswerSetLogic({"a"}), kb={rule("a", neg=["a"])})])
    assert min_cost(dead, dead.kbs, ()) == []


def test_belief_distance_examples():
    a = frozenset({"a"})
    d_max = DistanceModel((symdiff, symdiff), "max")
    d_avg = DistanceModel((symdiff, symdiff), "avg")
    assert belief_distance(d_max, (a, E), (E, E)) == 1
    assert belief_distance(d_avg, (a, E), (E, E)) == Fraction(1, 2)
    assert belief_distance(d_max, (a, a), (a, a)) == 0 == belief_distance(d_avg, (a, a), (a, a))


def test_min_next_global_across_branches(fork_system):
    S, K = (E,), (E,)
    assert min_next(fork_system, S, (Q,), (E,), K) == [((E,), (E,))]


def test_min_next_single_and_empty(deferred_only_system):
    assert min_next(deferred_only_system, (E,), (Q,), (E,), (E,)) == [((P,), (P,))]
    from emcs import AnswerSetLogic, rule

    ctx = EvolvingContext(
        AnswerSetLogic({"a", "b"}),
        kb={rule("a", neg=["a", "b"])},
        bridge_rules=[BridgeRule(now("add", rule("b")), [observed(0, "q")])],
    )
    dead_next = EMCS([ctx], [ObservationContext({"q"})])
    assert min_next(dead_next, (frozenset({"b"}),), (Q,), (E,), dead_next.kbs) == []


def mutual_support():
    """add(a) <- (c:b) and add(b) <- (c:a): equilibria {} and {a, b}."""
    ctx = EvolvingContext(
        FactStore({"a", "b"}),
        bridge_rules=[BridgeRule(now("add", "a"), [belief(0, "b")]), BridgeRule(now("add", "b"), [belief(0, "a")])],
    )
    return EMCS([ctx])


AB = frozenset({"a", "b"})


def test_min_dist_examples():
    M = mutual_support()
    assert min_cost(M, M.kbs, ()) == [(E,), (AB,)]
    assert min_dist(M, (E,), (), M.kbs) == [(E,)]
    assert min_dist(M, (AB,), (), M.kbs) == [(AB,)]
    assert min_dist(M, (frozenset({"a"}),), (), M.kbs) == [(E,), (AB,)]


def test_weak_rejects_far_state_in_own_branch():
    M = mutual_support()
    Obs = [(), ()]
    traces = {t.states: t for t in enumerate_evolving_equilibria(M, Obs, 2)}
    assert not check_weak(M, Obs, traces[((E,), (AB,))])
    assert check_weak(M, Obs, traces[((AB,), (AB,))])
    assert check_weak(M, Obs, traces[((E,), (E,))])


def test_strong_rejects_dominated_branch(fork_system):
    Obs = [(Q,), (E,)]
    traces = {t.kb_configs[1]: t for t in enumerate_evolving_equilibria(fork_system, Obs, 2)}
    far, near = traces[(P,)], traces[(E,)]
    assert not check_strong(fork_system, Obs, far)
    assert check_strong(fork_system, Obs, near)
    assert check_weak(fork_system, Obs, far)
    assert select_strong(fork_system, Obs, 2) == [near]
    assert select_weak(fork_system, Obs, 2) == sorted([near, far], key=lambda t: t.sort_key())


def test_size_one_min_cost_trace_passes_both(deferred_only_system):
    (t,) = enumerate_evolving_equilibria(deferred_only_system, [(Q,)], 1)
    assert check_strong(deferred_only_system, [(Q,)], t)
    assert check_weak(deferred_only_system, [(Q,)], t)


def test_unique_evolving_equilibrium_selected(deferred_only_system):
    Obs = [(Q,), (E,)]
    (t,) = enumerate_evolving_equilibria(deferred_only_system, Obs, 2)
    assert select_strong(deferred_only_system, Obs, 2) == [t]
    assert select_weak(deferred_only_system, Obs, 2) == [t]
    assert min_cost_global(deferred_only_system, Obs, 2) == [t]


def test_global_cost_examples():
    ctx = EvolvingContext(
        FactStore({"p", "z"}),
        bridge_rules=[
            BridgeRule(later("add", "p"), [observed(0, "a")]),
            BridgeRule(later("add", "p"), [observed(0, "b")]),
            BridgeRule(later("add", "z"), [observed(0, "b")]),
        ],
    )
    M = EMCS([ctx], [ObservationContext({"a", "b"})])
    Obs = [(frozenset({"a"}),), (frozenset({"b"}),)]
    (t,) = enumerate_evolving_equilibria(M, Obs, 2)
    assert [step_cost(M, S, Obs[j]) for j, S in enumerate(t.states)] == [1, 2]
    assert global_cost(M, t, Obs) == 3
    (t1,) = enumerate_evolving_equilibria(M, Obs, 1)
    assert global_cost(M, t1, Obs) == step_cost(M, t1.states[0], Obs[0]) == 1
    quiet = enumerate_evolving_equilibria(M, [(E,), (E,)], 2)
    assert [global_cost(M, t, [(E,), (E,)]) for t in quiet] == [0]


def test_min_cost_global_picks_cheaper_trace():
    M = self_support(
        BridgeRule(later("add", "p"), [belief(0, "r", negated=True)]),
        BridgeRule(later("add", "x"), [belief(0, "r", negated=True)]),
        BridgeRule(later("add", "p"), [belief(0, "r")]),
        BridgeRule(later("add", "x"), [belief(0, "r")]),
        BridgeRule(later("add", "y"), [belief(0, "r")]),
    )
    traces = enumerate_evolving_equilibria(M, [()], 1)
    assert sorted(global_cost(M, t, [()]) for t in traces) == [2, 3]
    (best,) = min_cost_global(M, [()], 1)
    assert best.states == ((E,),)


def test_greedy_trap(greedy_trap_system):
    M = greedy_trap_system
    Obs = [(Q,), (E,)]
    traces = enumerate_evolving_equilibria(M, Obs, 2)
    assert traces and all(t.states[0] == (frozenset({"p", "r"}),) for t in traces)
    # cheapest step-1 equilibrium is {p}, whose branch dies
    assert min_cost(M, M.kbs, Obs[0]) == [(P,)]
    assert select_strong(M, Obs, 2, lookahead=False) == []
    assert select_weak(M, Obs, 2, lookahead=False) == []
    (strong,) = select_strong(M, Obs, 2)
    assert strong.states == ((frozenset({"p", "r"}),), (P,))
    assert strong in select_weak(M, Obs, 2)


@pytest.mark.parametrize("seed", range(0, 300, 3))
def test_scaling_costs_keeps_argmins(seed):
    M, Obs, s = random_instance(seed)
    base, tripled = CostModel.of(M), CostModel.of(M).scaled(3)
    K = M.kbs
    assert min_cost(M, K, Obs[0], costs=base) == min_cost(M, K, Obs[0], costs=tripled)
    traces = enumerate_evolving_equilibria(M, Obs, s)
    assert min_cost_global(M, Obs, s, costs=base, traces=traces) == min_cost_global(
        M, Obs, s, costs=tripled, traces=traces
    )
    for S in [w.state for w in enumerate_equilibria(M, Obs[0])]:
        assert min_dist(M, S, Obs[0], K, costs=base) == min_dist(M, S, Obs[0], K, costs=tripled)
        if len(Obs) > 1:
            assert min_next(M, S, Obs[0], Obs[1], K, costs=base) == min_next(M, S, Obs[0], Obs[1], K, costs=tripled)


@pytest.mark.parametrize("seed", range(100))
def test_selection_inclusions(seed):
    M, Obs, s = random_instance(seed)
    distance = DistanceModel.of(M, "avg" if seed % 2 else "max")
    traces = enumerate_evolving_equilibria(M, Obs, s)
    strong = select_strong(M, Obs, s, traces=traces, distance=distance)
    weak = select_weak(M, Obs, s, traces=traces, distance=distance)
    assert all(t in weak for t in strong)
    assert bool(traces) == bool(strong) == bool(weak)
    K = M.kbs
    eqs = [w.state for w in enumerate_equilibria(M, Obs[0])]
    cheap = min_cost(M, K, Obs[0])
    assert all(S in eqs for S in cheap)
    for S in eqs:
        assert all(x in cheap for x in min_dist(M, S, Obs[0], K, distance=distance))
        if len(Obs) > 1:
            for S2, K2 in min_next(M, S, Obs[0], Obs[1], K, distance=distance):
                assert S2 in min_cost(M, K2, Obs[1])
        unit = CostModel.unit(M)
        assert step_cost(M, S, Obs[0], unit) == sum(len(o) for o in next_ops(M, S, Obs[0]))


def test_distance_model_is_a_metric_on_small_shape():
    sets = [frozenset(c) for c in [(), ("a",), ("b",), ("a", "b")]]
    states = list(product(sets, sets))
    for agg in ("max", "avg"):
        d = DistanceModel((symdiff, symdiff), agg)
        for x, y in product(states, states):
            assert d(x, y) >= 0
            assert (d(x, y) == 0) == (x == y)
            assert d(x, y) == d(y, x)
