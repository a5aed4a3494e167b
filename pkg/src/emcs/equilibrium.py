"""Static equilibria of an eMCS for one instant observation.

:func:`enumerate_equilibria` is the main solver (guess the applicable
instantaneous heads per context, then check). :func:`oracle_equilibria`
walks the full product of every signature's power set and is kept only
as an independent reference for testing.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from itertools import chain, combinations, product
from typing import List, Optional, Sequence, Tuple

from .errors import BudgetExceeded
from .logic import acc, kb_key, powerset
from .system import (
    EMCS,
    BeliefState,
    InstantObservation,
    KBConfiguration,
    app_now,
    mng,
    state_key,
)

DEFAULT_BUDGET = 10**6


def default_budget() -> int:
    """Search budget, overridable through ``EMCS_BUDGET``."""
    value = os.environ.get("EMCS_BUDGET")
    return int(value) if value else DEFAULT_BUDGET


@dataclass
class SearchStats:
    candidates: int = 0
    calls: int = 0


@dataclass(frozen=True)
class EquilibriumWitness:
    state: BeliefState
    witness_kbs: KBConfiguration


def _resolve(M: EMCS, obs, kbs) -> Tuple[InstantObservation, KBConfiguration]:
    obs = M.check_observation(obs)
    kbs = M.kbs if kbs is None else M.check_configuration(kbs)
    return obs, kbs


def is_equilibrium(
    M: EMCS,
    obs: Sequence,
    S: Sequence,
    kbs: Optional[Sequence] = None,
) -> Optional[EquilibriumWitness]:
    """Witness for ``S`` being an equilibrium of ``M[kbs]`` given ``obs``, else ``None``.

    The returned witness is truthy, so the result can be used as a boolean.
    """
    obs, kbs = _resolve(M, obs, kbs)
    S = M.check_state(S)
    return _certify(M, obs, kbs, S)


def _certify(M: EMCS, obs, kbs, S) -> Optional[EquilibriumWitness]:
    witnesses = []
    for i, ctx in enumerate(M.contexts):
        ops = app_now(M, i, S, obs)
        for kb in sorted(mng(ctx, ops, kbs[i]), key=kb_key):
            if S[i] in acc(ctx.logic, kb):
                witnesses.append(kb)
                break
        else:
            return None
    return EquilibriumWitness(S, tuple(witnesses))


def _subsets(items):
    return chain.from_iterable(combinations(items, k) for k in range(len(items) + 1))


def enumerate_equilibria(
    M: EMCS,
    obs: Sequence,
    kbs: Optional[Sequence] = None,
    *,
    budget: Optional[int] = None,
    stats: Optional[SearchStats] = None,
) -> List[EquilibriumWitness]:
    """All equilibria of ``M[kbs]`` given ``obs``, in canonical order.

    For each context a set of instantaneous heads is guessed, the belief
    sets reachable through ``mng`` and ``acc`` are collected, and every
    combination is kept only if the guessed heads are exactly those
    applicable in the assembled state.
    """
    obs, kbs = _resolve(M, obs, kbs)
    return _enumerate(M, obs, kbs, budget, stats)


def _enumerate(M, obs, kbs, budget=None, stats=None) -> List[EquilibriumWitness]:
    budget = default_budget() if budget is None else budget
    options = []
    for i, ctx in enumerate(M.contexts):
        heads = sorted({r.head.inner for r in ctx.bridge_rules if not r.head.deferred}, key=lambda f: f.sort_key())
        per_ctx = []
        for guess in _subsets(heads):
            guess = frozenset(guess)
            first_kb = {}
            for kb in sorted(mng(ctx, guess, kbs[i]), key=kb_key):
                for bs in acc(ctx.logic, kb):
                    first_kb.setdefault(bs, kb)
            per_ctx.extend((guess, bs, kb) for bs, kb in first_kb.items())
        options.append(per_ctx)

    total = math.prod(len(o) for o in options)
    if total > budget:
        raise BudgetExceeded("equilibrium search", total, budget)
    if stats is not None:
        stats.candidates += total
        stats.calls += 1

    found = {}
    for combo in product(*options):
        S = tuple(bs for _, bs, _ in combo)
        if S in found:
            continue
        if all(app_now(M, i, S, obs) == combo[i][0] for i in range(len(combo))):
            found[S] = tuple(kb for _, _, kb in combo)
    return [EquilibriumWitness(S, found[S]) for S in sorted(found, key=state_key)]


def oracle_equilibria(
    M: EMCS,
    obs: Sequence,
    kbs: Optional[Sequence] = None,
    *,
    cap: Optional[int] = None,
) -> List[BeliefState]:
    """Brute-force reference: test every belief state in ``BS_M``."""
    obs, kbs = _resolve(M, obs, kbs)
    cap = default_budget() if cap is None else cap
    spaces = [powerset(ctx.logic.signature) for ctx in M.contexts]
    total = math.prod(len(s) for s in spaces)
    if total > cap:
        raise BudgetExceeded("oracle", total, cap)
    return sorted(
        (S for S in product(*spaces) if _certify(M, obs, kbs, S) is not None),
        key=state_key,
    )


__all__ = [
    "DEFAULT_BUDGET",
    "EquilibriumWitness",
    "SearchStats",
    "default_budget",
    "enumerate_equilibria",
    "is_equilibrium",
    "oracle_equilibria",
]
