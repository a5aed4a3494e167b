"""Minimal-change selection among (evolving) equilibria.

Costs are summed over the deferred operations a belief state triggers;
distances between belief states aggregate per-context belief-set
distances by ``max`` or ``avg``. On top of those sit the selectors
``min_eq``, ``min_cost``, ``min_next`` and ``min_dist`` and the strong,
weak and global-cost criteria over whole traces.

Lookahead
---------
Taken literally, the per-step minimizations can discard every branch
that still extends to an evolving equilibrium of the requested size (a
cheap equilibrium may leave a configuration with no equilibrium at the
next step). With ``lookahead=True`` (the default for the criteria) every
candidate set is first restricted to states that extend to a full
evolving equilibrium of the trace's size, which keeps selection
non-empty whenever evolving equilibria exist. ``lookahead=False`` gives
the unrestricted reading.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .equilibrium import SearchStats, _enumerate, default_budget
from .errors import ShapeError
from .evolution import (
    EquilibriumTrace,
    _next_kb,
    check_sequence,
    enumerate_evolving_equilibria,
    next_ops,
)
from .system import EMCS, BeliefState, InstantObservation, KBConfiguration, configuration_key, state_key

AGGREGATORS = ("max", "avg")


@dataclass(frozen=True)
class CostModel:
    """``cost_i`` for every context, as operation-name → natural number maps."""

    costs: Tuple[Mapping[str, int], ...]

    @classmethod
    def of(cls, M: EMCS) -> "CostModel":
        return cls(tuple(dict(c.costs) for c in M.contexts))

    @classmethod
    def unit(cls, M: EMCS) -> "CostModel":
        return cls(tuple({op: 1 for op in c.management_base} for c in M.contexts))

    def scaled(self, factor: int) -> "CostModel":
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return CostModel(tuple({op: c * factor for op, c in m.items()} for m in self.costs))

    def cost(self, i: int, op: str) -> int:
        return self.costs[i][op]


@dataclass(frozen=True)
class DistanceModel:
    distances: Tuple[Callable, ...]
    aggregator: str = "max"

    def __post_init__(self):
        if self.aggregator not in AGGREGATORS:
            raise ValueError(f"aggregator must be one of {AGGREGATORS}")

    @classmethod
    def of(cls, M: EMCS, aggregator: str = "max") -> "DistanceModel":
        return cls(tuple(c.distance for c in M.contexts), aggregator)

    def __call__(self, S1: BeliefState, S2: BeliefState) -> Fraction:
        if len(S1) != len(self.distances) or len(S2) != len(self.distances):
            raise ShapeError("belief states do not match the distance model")
        parts = [Fraction(d(a, b)) for d, a, b in zip(self.distances, S1, S2)]
        if self.aggregator == "max":
            return max(parts)
        return sum(parts, Fraction(0)) / len(parts)


def belief_distance(model: DistanceModel, S1: Sequence, S2: Sequence) -> Fraction:
    return model(tuple(frozenset(s) for s in S1), tuple(frozenset(s) for s in S2))


def _costs(M, costs):
    return CostModel.of(M) if costs is None else costs


def _step_cost(M, S, obs, costs: CostModel) -> int:
    return sum(
        costs.cost(i, f.op)
        for i, ops in enumerate(next_ops(M, S, obs))
        for f in ops
    )


def step_cost(M: EMCS, S: Sequence, obs: Sequence, costs: Optional[CostModel] = None) -> int:
    """Total cost of the deferred operations applicable in ``S`` given ``obs``."""
    return _step_cost(M, M.check_state(S), M.check_observation(obs), _costs(M, costs))


def global_cost(M: EMCS, trace: EquilibriumTrace, Obs: Sequence, costs: Optional[CostModel] = None) -> int:
    Obs = check_sequence(M, Obs)
    costs = _costs(M, costs)
    return sum(_step_cost(M, S, Obs[j], costs) for j, S in enumerate(trace.states))


class _Equilibria:
    """Cached equilibria of ``M[K]`` keyed by configuration and observation."""

    def __init__(self, M: EMCS, budget=None, stats=None):
        self.M = M
        self.budget = default_budget() if budget is None else budget
        self.stats = stats
        self._cache: Dict = {}

    def __call__(self, K: KBConfiguration, obs: InstantObservation) -> List[BeliefState]:
        key = (K, obs)
        if key not in self._cache:
            self._cache[key] = [w.state for w in _enumerate(self.M, obs, K, self.budget, self.stats)]
        return self._cache[key]


Admissible = Optional[Callable[[BeliefState, KBConfiguration], bool]]


def _min_cost(M, eqs, K, obs, costs, admissible: Admissible = None) -> List[BeliefState]:
    candidates = [S for S in eqs(K, obs) if admissible is None or admissible(S, K)]
    if not candidates:
        return []
    priced = [(_step_cost(M, S, obs, costs), S) for S in candidates]
    best = min(c for c, _ in priced)
    return [S for c, S in priced if c == best]


def _min_next(M, eqs, S, obs_j, obs_j1, K, costs, distance, admissible: Admissible = None):
    pairs = [
        (S2, K2)
        for K2 in _next_kb(M, S, obs_j, K)
        for S2 in _min_cost(M, eqs, K2, obs_j1, costs, admissible)
    ]
    if not pairs:
        return []
    measured = [(distance(S, S2), S2, K2) for S2, K2 in pairs]
    best = min(d for d, _, _ in measured)
    return sorted(
        ((S2, K2) for d, S2, K2 in measured if d == best),
        key=lambda p: (state_key(p[0]), configuration_key(p[1])),
    )


def _min_dist(M, eqs, S, obs, K, costs, distance, admissible: Admissible = None) -> List[BeliefState]:
    candidates = _min_cost(M, eqs, K, obs, costs, admissible)
    if not candidates:
        return []
    measured = [(distance(S, S2), S2) for S2 in candidates]
    best = min(d for d, _ in measured)
    return [S2 for d, S2 in measured if d == best]


def min_eq(M: EMCS, K: Sequence, obs: Sequence, *, budget: Optional[int] = None) -> List[BeliefState]:
    """Equilibria of ``M[K]`` not dominated by strict inclusion of deferred operations.

    ``S`` is dominated when some equilibrium ``S'`` has a strictly smaller
    deferred-operation set in every context at once.
    """
    K, obs = M.check_configuration(K), M.check_observation(obs)
    eqs = _Equilibria(M, budget)(K, obs)
    ops = {S: next_ops(M, S, obs) for S in eqs}

    def dominates(a, b):
        return all(x < y for x, y in zip(ops[a], ops[b]))

    return [S for S in eqs if not any(dominates(T, S) for T in eqs)]


def min_cost(
    M: EMCS,
    K: Sequence,
    obs: Sequence,
    *,
    costs: Optional[CostModel] = None,
    budget: Optional[int] = None,
) -> List[BeliefState]:
    """Equilibria of ``M[K]`` given ``obs`` with the least step cost."""
    K, obs = M.check_configuration(K), M.check_observation(obs)
    return _min_cost(M, _Equilibria(M, budget), K, obs, _costs(M, costs))


def min_next(
    M: EMCS,
    S: Sequence,
    obs_j: Sequence,
    obs_next: Sequence,
    K: Sequence,
    *,
    costs: Optional[CostModel] = None,
    distance: Optional[DistanceModel] = None,
    budget: Optional[int] = None,
) -> List[Tuple[BeliefState, KBConfiguration]]:
    """Cheapest successor equilibria closest to ``S``, minimized across all successor configurations."""
    S, K = M.check_state(S), M.check_configuration(K)
    obs_j, obs_next = M.check_observation(obs_j), M.check_observation(obs_next)
    distance = distance or DistanceModel.of(M)
    return _min_next(M, _Equilibria(M, budget), S, obs_j, obs_next, K, _costs(M, costs), distance)


def min_dist(
    M: EMCS,
    S: Sequence,
    obs: Sequence,
    K: Sequence,
    *,
    costs: Optional[CostModel] = None,
    distance: Optional[DistanceModel] = None,
    budget: Optional[int] = None,
) -> List[BeliefState]:
    """Cheapest equilibria of the fixed configuration ``M[K]`` closest to ``S``."""
    S, K, obs = M.check_state(S), M.check_configuration(K), M.check_observation(obs)
    distance = distance or DistanceModel.of(M)
    return _min_dist(M, _Equilibria(M, budget), S, obs, K, _costs(M, costs), distance)


class _Horizon:
    """Per-instance caches for checking traces of one size against ``Obs``."""

    def __init__(self, M, Obs, size, costs, distance, lookahead, budget=None, stats=None):
        self.M = M
        self.Obs = Obs
        self.size = size
        self.costs = costs
        self.distance = distance
        self.lookahead = lookahead
        self.eqs = _Equilibria(M, budget, stats)
        self._viable: Dict = {}
        self._memo: Dict = {}

    def viable(self, j: int, K: KBConfiguration, S: BeliefState) -> bool:
        """Whether ``S`` at step ``j`` under ``K`` extends to ``size`` steps."""
        if j == self.size - 1:
            return True
        key = (j, K, S)
        if key not in self._viable:
            self._viable[key] = any(
                self.viable(j + 1, K2, S2)
                for K2 in _next_kb(self.M, S, self.Obs[j], K)
                for S2 in self.eqs(K2, self.Obs[j + 1])
            )
        return self._viable[key]

    def admissible(self, j: int) -> Admissible:
        if not self.lookahead:
            return None
        return lambda S, K: self.viable(j, K, S)

    def _cached(self, key, compute):
        if key not in self._memo:
            self._memo[key] = compute()
        return self._memo[key]

    def min_cost(self, K, j):
        return self._cached(
            ("cost", K, j),
            lambda: _min_cost(self.M, self.eqs, K, self.Obs[j], self.costs, self.admissible(j)),
        )

    def min_next(self, S, K, j):
        return self._cached(
            ("next", S, K, j),
            lambda: _min_next(
                self.M, self.eqs, S, self.Obs[j], self.Obs[j + 1], K,
                self.costs, self.distance, self.admissible(j + 1),
            ),
        )

    def min_dist(self, S, K, j):
        return self._cached(
            ("dist", S, K, j),
            lambda: _min_dist(
                self.M, self.eqs, S, self.Obs[j], K, self.costs, self.distance, self.admissible(j)
            ),
        )

    def strong(self, trace: EquilibriumTrace) -> bool:
        states, configs = trace.states, trace.kb_configs
        for j in range(trace.size):
            if states[j] not in self.min_cost(configs[j], j):
                return False
            if j < trace.size - 1:
                if (states[j + 1], configs[j + 1]) not in self.min_next(states[j], configs[j], j):
                    return False
        return True

    def weak(self, trace: EquilibriumTrace) -> bool:
        states, configs = trace.states, trace.kb_configs
        for j in range(trace.size):
            if states[j] not in self.min_cost(configs[j], j):
                return False
            if j < trace.size - 1:
                if states[j + 1] not in self.min_dist(states[j], configs[j + 1], j + 1):
                    return False
        return True


def _horizon(M, Obs, size, costs, distance, lookahead, budget=None, stats=None) -> _Horizon:
    Obs = check_sequence(M, Obs)
    return _Horizon(M, Obs, size, _costs(M, costs), distance or DistanceModel.of(M), lookahead, budget, stats)


def check_strong(
    M: EMCS,
    Obs: Sequence,
    trace: EquilibriumTrace,
    *,
    costs: Optional[CostModel] = None,
    distance: Optional[DistanceModel] = None,
    lookahead: bool = True,
    budget: Optional[int] = None,
) -> bool:
    """Strong criterion: per-step least cost, then least distance across every successor configuration."""
    return _horizon(M, Obs, trace.size, costs, distance, lookahead, budget).strong(trace)


def check_weak(
    M: EMCS,
    Obs: Sequence,
    trace: EquilibriumTrace,
    *,
    costs: Optional[CostModel] = None,
    distance: Optional[DistanceModel] = None,
    lookahead: bool = True,
    budget: Optional[int] = None,
) -> bool:
    """Weak criterion: least distance only within the configuration the trace actually took."""
    return _horizon(M, Obs, trace.size, costs, distance, lookahead, budget).weak(trace)


def _select(M, Obs, size, which, costs, distance, lookahead, budget, stats, traces):
    h = _horizon(M, Obs, size, costs, distance, lookahead, budget, stats)
    if traces is None:
        traces = enumerate_evolving_equilibria(M, Obs, size, budget=budget, stats=stats)
    check = h.strong if which == "strong" else h.weak
    return [t for t in traces if check(t)]


def select_strong(
    M: EMCS,
    Obs: Sequence,
    size: int,
    *,
    costs: Optional[CostModel] = None,
    distance: Optional[DistanceModel] = None,
    lookahead: bool = True,
    budget: Optional[int] = None,
    stats: Optional[SearchStats] = None,
    traces: Optional[List[EquilibriumTrace]] = None,
) -> List[EquilibriumTrace]:
    return _select(M, Obs, size, "strong", costs, distance, lookahead, budget, stats, traces)


def select_weak(
    M: EMCS,
    Obs: Sequence,
    size: int,
    *,
    costs: Optional[CostModel] = None,
    distance: Optional[DistanceModel] = None,
    lookahead: bool = True,
    budget: Optional[int] = None,
    stats: Optional[SearchStats] = None,
    traces: Optional[List[EquilibriumTrace]] = None,
) -> List[EquilibriumTrace]:
    return _select(M, Obs, size, "weak", costs, distance, lookahead, budget, stats, traces)


def min_cost_global(
    M: EMCS,
    Obs: Sequence,
    size: int,
    *,
    costs: Optional[CostModel] = None,
    budget: Optional[int] = None,
    stats: Optional[SearchStats] = None,
    traces: Optional[List[EquilibriumTrace]] = None,
) -> List[EquilibriumTrace]:
    """Evolving equilibria of ``size`` whose summed step cost is least."""
    if traces is None:
        traces = enumerate_evolving_equilibria(M, Obs, size, budget=budget, stats=stats)
    if not traces:
        return []
    priced = [(global_cost(M, t, Obs, costs), t) for t in traces]
    best = min(c for c, _ in priced)
    return [t for c, t in priced if c == best]


__all__ = [
    "AGGREGATORS",
    "CostModel",
    "DistanceModel",
    "belief_distance",
    "check_strong",
    "check_weak",
    "global_cost",
    "min_cost",
    "min_cost_global",
    "min_dist",
    "min_eq",
    "min_next",
    "select_strong",
    "select_weak",
    "step_cost",
]
