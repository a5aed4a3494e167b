"""Evolving multi-context systems: contexts, bridge rules and management.

Indices of contexts and observers are 0-based throughout the library;
the text format refers to them by name.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from dataclasses import replace as _dc_replace
from functools import lru_cache
from itertools import product
from typing import AbstractSet, Callable, FrozenSet, Hashable, Iterable, Mapping, Sequence, Tuple

from .errors import InvalidKnowledgeBase, ManagementError, ShapeError, UnknownOperation
from .logic import BeliefSet, KnowledgeBase, Logic, kb_key, render_element, symdiff

BeliefState = Tuple[BeliefSet, ...]
InstantObservation = Tuple[FrozenSet[str], ...]
KBConfiguration = Tuple[KnowledgeBase, ...]

BUILTIN_OPERATIONS = frozenset({"add", "del"})


@dataclass(frozen=True, order=True)
class OperationalFormula:
    """``op(arg)`` where ``arg`` is a kb-element of the owning context."""

    op: str
    arg: Hashable

    def __str__(self) -> str:
        return f"{self.op}({render_element(self.arg).rstrip('.')})"

    def sort_key(self):
        return (self.op, render_element(self.arg))


@dataclass(frozen=True)
class Head:
    """Bridge-rule head: an operational formula, optionally under ``next``."""

    inner: OperationalFormula
    deferred: bool = False

    def __str__(self) -> str:
        return f"next({self.inner})" if self.deferred else str(self.inner)

    def sort_key(self):
        return (self.deferred,) + self.inner.sort_key()


def now(op: str, arg) -> Head:
    return Head(OperationalFormula(op, arg))


def later(op: str, arg) -> Head:
    return Head(OperationalFormula(op, arg), deferred=True)


@dataclass(frozen=True)
class BridgeLiteral:
    """``(r:b)`` when ``observation`` is false, ``(r@b)`` otherwise."""

    target: int
    atom: str
    observation: bool = False
    negated: bool = False

    def negate(self) -> "BridgeLiteral":
        return _dc_replace(self, negated=not self.negated)


def belief(target: int, atom: str, negated: bool = False) -> BridgeLiteral:
    return BridgeLiteral(target, atom, observation=False, negated=negated)


def observed(target: int, atom: str, negated: bool = False) -> BridgeLiteral:
    return BridgeLiteral(target, atom, observation=True, negated=negated)


@dataclass(frozen=True)
class BridgeRule:
    head: Head
    body: FrozenSet[BridgeLiteral] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "body", frozenset(self.body))


@dataclass(frozen=True)
class ObservationContext:
    language: FrozenSet[str]
    current: FrozenSet[str] = frozenset()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "language", frozenset(self.language))
        object.__setattr__(self, "current", frozenset(self.current))
        extra = self.current - self.language
        if extra:
            raise ShapeError(f"observation {sorted(extra)} outside language of {self.name or 'observer'}")


ManagementFunction = Callable[[FrozenSet[OperationalFormula], KnowledgeBase], FrozenSet[KnowledgeBase]]


@lru_cache(maxsize=1 << 16)
def builtin_mng(ops: FrozenSet[OperationalFormula], kb: KnowledgeBase) -> FrozenSet[KnowledgeBase]:
    """Set semantics for ``add``/``del``.

    When the same element is both added and deleted, both resolutions are
    produced, so ``k`` conflicts yield ``2**k`` successors.
    """
    adds = {f.arg for f in ops if f.op == "add"}
    dels = {f.arg for f in ops if f.op == "del"}
    unknown = {f.op for f in ops} - BUILTIN_OPERATIONS
    if unknown:
        raise UnknownOperation(f"builtin management has no operation {sorted(unknown)}")
    conflicts = sorted(adds & dels, key=render_element)
    base = (frozenset(kb) | (adds - dels)) - (dels - adds)
    results = set()
    for choice in product((True, False), repeat=len(conflicts)):
        kept = {e for e, add_wins in zip(conflicts, choice) if add_wins}
        results.add(frozenset((base - set(conflicts)) | kept))
    return frozenset(results)


DEFAULT_COSTS = {"add": 1, "del": 1}


@dataclass(frozen=True, eq=True)
class EvolvingContext:
    logic: Logic
    kb: KnowledgeBase = frozenset()
    bridge_rules: Tuple[BridgeRule, ...] = ()
    management_base: FrozenSet[str] = BUILTIN_OPERATIONS
    mng: ManagementFunction = builtin_mng
    costs: Mapping[str, int] = field(default_factory=lambda: dict(DEFAULT_COSTS))
    distance: Callable[[BeliefSet, BeliefSet], object] = symdiff
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kb", frozenset(self.kb))
        object.__setattr__(self, "bridge_rules", tuple(self.bridge_rules))
        object.__setattr__(self, "management_base", frozenset(self.management_base))
        object.__setattr__(self, "costs", dict(self.costs))
        violations = self.logic.validate(self.kb)
        if violations:
            raise InvalidKnowledgeBase(violations)
        for r in self.bridge_rules:
            f = r.head.inner
            if f.op not in self.management_base:
                raise UnknownOperation(f"{f.op} not in management base of {self.name or 'context'}")
            bad = self.logic.element_violations(f.arg)
            if bad:
                raise InvalidKnowledgeBase(bad)
        missing = self.management_base - set(self.costs)
        if missing:
            raise ValueError(f"no cost for operations {sorted(missing)}")
        negative = [op for op, c in self.costs.items() if not isinstance(c, int) or c < 0]
        if negative:
            raise ValueError(f"costs must be natural numbers: {sorted(negative)}")

    def with_kb(self, kb: AbstractSet) -> "EvolvingContext":
        """``C_i[k]``."""
        return _dc_replace(self, kb=frozenset(kb))


@dataclass(frozen=True)
class EMCS:
    contexts: Tuple[EvolvingContext, ...]
    observers: Tuple[ObservationContext, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "contexts", tuple(self.contexts))
        object.__setattr__(self, "observers", tuple(self.observers))
        if not self.contexts:
            raise ShapeError("an eMCS needs at least one evolving context")
        n, ell = len(self.contexts), len(self.observers)
        for ctx in self.contexts:
            for r in ctx.bridge_rules:
                for lit in r.body:
                    if lit.observation:
                        if not 0 <= lit.target < ell:
                            raise ShapeError(f"observer index {lit.target} out of range")
                        if lit.atom not in self.observers[lit.target].language:
                            raise ShapeError(f"{lit.atom} not in language of observer {lit.target}")
                    else:
                        if not 0 <= lit.target < n:
                            raise ShapeError(f"context index {lit.target} out of range")
                        if lit.atom not in self.contexts[lit.target].logic.signature:
                            raise ShapeError(f"{lit.atom} not in signature of context {lit.target}")

    @property
    def kbs(self) -> KBConfiguration:
        return tuple(c.kb for c in self.contexts)

    @property
    def current_observation(self) -> InstantObservation:
        return tuple(o.current for o in self.observers)

    def check_state(self, S: Sequence[AbstractSet[str]]) -> BeliefState:
        if len(S) != len(self.contexts):
            raise ShapeError(f"belief state has {len(S)} components, system has {len(self.contexts)} contexts")
        state = tuple(frozenset(s) for s in S)
        for i, (s, ctx) in enumerate(zip(state, self.contexts)):
            if not s <= ctx.logic.signature:
                raise ShapeError(f"belief set {sorted(s)} of context {i} outside signature")
        return state

    def check_observation(self, obs: Sequence[AbstractSet[str]]) -> InstantObservation:
        if len(obs) != len(self.observers):
            raise ShapeError(f"instant observation has {len(obs)} components, system has {len(self.observers)} observers")
        out = tuple(frozenset(o) for o in obs)
        for i, (o, ob) in enumerate(zip(out, self.observers)):
            if not o <= ob.language:
                raise ShapeError(f"observation {sorted(o - ob.language)} outside language of observer {i}")
        return out

    def check_configuration(self, K: Sequence[AbstractSet]) -> KBConfiguration:
        if len(K) != len(self.contexts):
            raise ShapeError(f"configuration has {len(K)} components, system has {len(self.contexts)} contexts")
        out = tuple(frozenset(k) for k in K)
        for k, ctx in zip(out, self.contexts):
            violations = ctx.logic.validate(k)
            if violations:
                raise InvalidKnowledgeBase(violations)
        return out


def satisfies(S: BeliefState, obs: InstantObservation, lit: BridgeLiteral) -> bool:
    source = obs if lit.observation else S
    if not 0 <= lit.target < len(source):
        kind = "observer" if lit.observation else "context"
        raise ShapeError(f"{kind} index {lit.target} out of range")
    return (lit.atom in source[lit.target]) != lit.negated


def applicable_heads(M: EMCS, i: int, S: BeliefState, obs: InstantObservation) -> FrozenSet[Head]:
    """``app_i(S, O)``: heads of context ``i``'s bridge rules whose bodies hold."""
    return frozenset(
        r.head for r in M.contexts[i].bridge_rules if all(satisfies(S, obs, lit) for lit in r.body)
    )


def split_app(heads: Iterable[Head]) -> Tuple[FrozenSet[OperationalFormula], FrozenSet[OperationalFormula]]:
    """Partition heads into (instantaneous, deferred) operational formulas."""
    now_part, next_part = set(), set()
    for h in heads:
        (next_part if h.deferred else now_part).add(h.inner)
    return frozenset(now_part), frozenset(next_part)


def app_now(M: EMCS, i: int, S: BeliefState, obs: InstantObservation) -> FrozenSet[OperationalFormula]:
    return split_app(applicable_heads(M, i, S, obs))[0]


def app_next(M: EMCS, i: int, S: BeliefState, obs: InstantObservation) -> FrozenSet[OperationalFormula]:
    return split_app(applicable_heads(M, i, S, obs))[1]


def mng(ctx: EvolvingContext, ops: AbstractSet[OperationalFormula], kb: AbstractSet) -> FrozenSet[KnowledgeBase]:
    """Apply ``ops`` to ``kb`` through the context's management function."""
    ops = frozenset(ops)
    unknown = sorted({f.op for f in ops} - ctx.management_base)
    if unknown:
        raise UnknownOperation(f"{unknown} not in management base of {ctx.name or 'context'}")
    kb = frozenset(kb)
    if not ops:
        return frozenset({kb})
    result = ctx.mng(ops, kb)
    if not result:
        raise ManagementError(f"management of {ctx.name or 'context'} returned no knowledge base")
    return frozenset(result)


def replace(M: EMCS, K: Sequence[AbstractSet], obs: Sequence[AbstractSet[str]] | None = None) -> EMCS:
    """``M_e[K]`` with each observer's current observation set to ``obs``."""
    K = M.check_configuration(K)
    contexts = tuple(c.with_kb(k) for c, k in zip(M.contexts, K))
    observers = M.observers
    if obs is not None:
        obs = M.check_observation(obs)
        observers = tuple(_dc_replace(o, current=frozenset(p)) for o, p in zip(M.observers, obs))
    return EMCS(contexts, observers)


def state_key(S: Sequence[AbstractSet[str]]):
    return tuple(tuple(sorted(s)) for s in S)


def configuration_key(K: Sequence[AbstractSet]):
    return tuple(kb_key(k) for k in K)


__all__ = [
    "BUILTIN_OPERATIONS",
    "BeliefState",
    "BridgeLiteral",
    "BridgeRule",
    "EMCS",
    "EvolvingContext",
    "Head",
    "InstantObservation",
    "KBConfiguration",
    "ObservationContext",
    "OperationalFormula",
    "app_next",
    "app_now",
    "applicable_heads",
    "belief",
    "builtin_mng",
    "configuration_key",
    "later",
    "mng",
    "now",
    "observed",
    "replace",
    "satisfies",
    "split_app",
    "state_key",
]
