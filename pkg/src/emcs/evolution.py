"""Evolving equilibria over observation sequences."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .equilibrium import SearchStats, _certify, _enumerate, default_budget
from .errors import BudgetExceeded, SizeExceedsObservations
from .logic import kb_key
from .system import (
    EMCS,
    BeliefState,
    InstantObservation,
    KBConfiguration,
    app_next,
    configuration_key,
    mng,
    state_key,
)

ObservationSequence = Tuple[InstantObservation, ...]
NextOps = Tuple[frozenset, ...]


@dataclass(frozen=True)
class EquilibriumTrace:
    """An evolving equilibrium with the configurations that witness it.

    ``applied_next_ops[j][i]`` is ``app_i^next(S^j, O^j)`` for every step
    ``j`` but the last, i.e. the operations that produced ``kb_configs[j+1]``.
    """

    states: Tuple[BeliefState, ...]
    kb_configs: Tuple[KBConfiguration, ...]
    applied_next_ops: Tuple[NextOps, ...] = ()

    @property
    def size(self) -> int:
        return len(self.states)

    def prefix(self, j: int) -> "EquilibriumTrace":
        return EquilibriumTrace(self.states[:j], self.kb_configs[:j], self.applied_next_ops[: max(j - 1, 0)])

    def sort_key(self):
        return (
            tuple(state_key(S) for S in self.states),
            tuple(configuration_key(K) for K in self.kb_configs),
        )


def check_sequence(M: EMCS, Obs: Sequence) -> ObservationSequence:
    return tuple(M.check_observation(o) for o in Obs)


def next_ops(M: EMCS, S: BeliefState, obs: InstantObservation) -> NextOps:
    return tuple(app_next(M, i, S, obs) for i in range(len(M.contexts)))


def next_kb(M: EMCS, S: Sequence, obs: Sequence, K: Sequence) -> List[KBConfiguration]:
    """Every configuration reachable from ``K`` through the deferred heads applicable in ``S``."""
    S = M.check_state(S)
    obs = M.check_observation(obs)
    K = M.check_configuration(K)
    return _next_kb(M, S, obs, K)


def _next_kb(M, S, obs, K) -> List[KBConfiguration]:
    choices = [
        sorted(mng(ctx, ops, k), key=kb_key)
        for ctx, ops, k in zip(M.contexts, next_ops(M, S, obs), K)
    ]
    return sorted(product(*choices), key=configuration_key)


class _StepSolver:
    """Memoized equilibria of ``M[K]`` per (configuration, step)."""

    def __init__(self, M: EMCS, Obs: ObservationSequence, budget: Optional[int], stats: Optional[SearchStats]):
        self.M = M
        self.Obs = Obs
        self.budget = default_budget() if budget is None else budget
        self.stats = stats
        self._cache: Dict[Tuple[KBConfiguration, int], List[BeliefState]] = {}

    def equilibria(self, K: KBConfiguration, j: int) -> List[BeliefState]:
        key = (K, j)
        if key not in self._cache:
            witnesses = _enumerate(self.M, self.Obs[j], K, self.budget, self.stats)
            self._cache[key] = [w.state for w in witnesses]
        return self._cache[key]


def enumerate_evolving_equilibria(
    M: EMCS,
    Obs: Sequence,
    size: int,
    *,
    budget: Optional[int] = None,
    stats: Optional[SearchStats] = None,
    solver: Optional[_StepSolver] = None,
) -> List[EquilibriumTrace]:
    """All evolving equilibria of the given size, one trace per configuration branch.

    The tree of (state, configuration) choices is expanded breadth-first;
    ``budget`` bounds both each static search and the number of live branches.
    """
    Obs = check_sequence(M, Obs)
    if size < 1:
        raise ValueError("size must be at least 1")
    if size > len(Obs):
        raise SizeExceedsObservations(f"size {size} exceeds {len(Obs)} observation steps")
    solver = solver or _StepSolver(M, Obs, budget, stats)

    frontier = [((), (M.kbs,), ())]
    for j in range(size):
        last = j == size - 1
        grown = []
        for states, configs, applied in frontier:
            K = configs[-1]
            for S in solver.equilibria(K, j):
                if last:
                    grown.append((states + (S,), configs, applied))
                    continue
                ops = next_ops(M, S, Obs[j])
                for K2 in _next_kb(M, S, Obs[j], K):
                    grown.append((states + (S,), configs + (K2,), applied + (ops,)))
            if len(grown) > solver.budget:
                raise BudgetExceeded("evolving equilibrium branches", len(grown), solver.budget)
        frontier = grown
    traces = [EquilibriumTrace(*t) for t in frontier]
    return sorted(traces, key=EquilibriumTrace.sort_key)


def is_evolving_equilibrium(M: EMCS, Obs: Sequence, states: Sequence[Sequence]) -> List[Tuple[KBConfiguration, ...]]:
    """Configuration sequences under which ``states`` is an evolving equilibrium.

    An empty list means it is not one.
    """
    Obs = check_sequence(M, Obs)
    states = [M.check_state(S) for S in states]
    if not states:
        raise ValueError("an evolving belief state has size at least 1")
    if len(states) > len(Obs):
        raise SizeExceedsObservations(f"size {len(states)} exceeds {len(Obs)} observation steps")
    paths = [(M.kbs,)]
    for j, S in enumerate(states):
        alive = [p for p in paths if _certify(M, Obs[j], p[-1], S) is not None]
        if j == len(states) - 1:
            paths = alive
            break
        paths = [p + (K2,) for p in alive for K2 in _next_kb(M, S, Obs[j], p[-1])]
    return sorted(paths, key=lambda p: tuple(configuration_key(K) for K in p))


def trace_from(M: EMCS, Obs: Sequence, states: Sequence, configs: Sequence) -> EquilibriumTrace:
    """Assemble a trace, recomputing the applied deferred operations."""
    Obs = check_sequence(M, Obs)
    states = tuple(M.check_state(S) for S in states)
    configs = tuple(M.check_configuration(K) for K in configs)
    applied = tuple(next_ops(M, S, Obs[j]) for j, S in enumerate(states[:-1]))
    return EquilibriumTrace(states, configs, applied)


def is_valid_trace(M: EMCS, Obs: Sequence, trace: EquilibriumTrace) -> bool:
    """Check every invariant of a trace against the inductive definition."""
    Obs = check_sequence(M, Obs)
    s = trace.size
    if s < 1 or s > len(Obs) or len(trace.kb_configs) != s or len(trace.applied_next_ops) != s - 1:
        return False
    if trace.kb_configs[0] != M.kbs:
        return False
    for j in range(s):
        S, K = trace.states[j], trace.kb_configs[j]
        if _certify(M, Obs[j], K, S) is None:
            return False
        if j < s - 1:
            ops = next_ops(M, S, Obs[j])
            if ops != trace.applied_next_ops[j]:
                return False
            K2 = trace.kb_configs[j + 1]
            if any(k2 not in mng(ctx, o, k) for ctx, o, k, k2 in zip(M.contexts, ops, K, K2)):
                return False
    return True


def check_prefix_property(M: EMCS, Obs: Sequence, trace: EquilibriumTrace) -> bool:
    """Every prefix of ``trace`` is an evolving equilibrium for every admissible observation prefix."""
    Obs = check_sequence(M, Obs)
    for j in range(1, trace.size + 1):
        head = trace.prefix(j)
        for k in range(j, len(Obs) + 1):
            witnesses = is_evolving_equilibrium(M, Obs[:k], head.states)
            if head.kb_configs not in witnesses:
                return False
            if not is_valid_trace(M, Obs[:k], head):
                return False
    return True


__all__ = [
    "EquilibriumTrace",
    "ObservationSequence",
    "check_prefix_property",
    "check_sequence",
    "enumerate_evolving_equilibria",
    "is_evolving_equilibrium",
    "is_valid_trace",
    "next_kb",
    "next_ops",
    "trace_from",
]
