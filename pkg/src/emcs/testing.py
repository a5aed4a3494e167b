"""Seeded generators of small random systems for property checks."""

from __future__ import annotations

import random
from typing import List, Tuple

from .logic import AnswerSetLogic, FactStore, Rule
from .system import EMCS, BridgeLiteral, BridgeRule, EvolvingContext, Head, ObservationContext, OperationalFormula

ATOMS = "abcd"
OBS_ATOMS = "qrs"


def _subset(rng: random.Random, atoms, p=0.5) -> frozenset:
    return frozenset(a for a in atoms if rng.random() < p)


def _asp_rule(rng: random.Random, sig: List[str]) -> Rule:
    head = rng.choice(sig)
    if rng.random() < 0.4:
        return Rule(head)
    pos = _subset(rng, sig, 0.25)
    neg = _subset(rng, sig, 0.3)
    return Rule(head, pos, neg)


def random_system(
    rng: random.Random,
    max_contexts: int = 3,
    max_observers: int = 2,
    max_signature: int = 4,
    max_rules: int = 5,
    max_body: int = 2,
) -> EMCS:
    n = rng.randint(1, max_contexts)
    ell = rng.randint(0, max_observers)
    observers = []
    for k in range(ell):
        lang = frozenset(OBS_ATOMS[: rng.randint(1, len(OBS_ATOMS))])
        observers.append(ObservationContext(lang, frozenset(), f"o{k + 1}"))
    sigs = [sorted(ATOMS[: rng.randint(1, max_signature)]) for _ in range(n)]
    kinds = [rng.choice(("asp", "factstore")) for _ in range(n)]

    contexts = []
    for i in range(n):
        sig = sigs[i]
        if kinds[i] == "asp":
            logic = AnswerSetLogic(frozenset(sig))
            kb = frozenset(_asp_rule(rng, sig) for _ in range(rng.randint(0, 3)))
        else:
            logic = FactStore(frozenset(sig))
            kb = _subset(rng, sig)
        rules = []
        for _ in range(rng.randint(0, max_rules)):
            atom = rng.choice(sig)
            arg = Rule(atom) if kinds[i] == "asp" and rng.random() < 0.8 else atom
            if kinds[i] == "asp" and not isinstance(arg, Rule):
                arg = _asp_rule(rng, sig)
            head = Head(OperationalFormula(rng.choice(("add", "add", "del")), arg), deferred=rng.random() < 0.45)
            body = set()
            for _ in range(rng.randint(0, max_body)):
                if observers and rng.random() < 0.4:
                    r = rng.randrange(ell)
                    body.add(BridgeLiteral(r, rng.choice(sorted(observers[r].language)), True, rng.random() < 0.3))
                else:
                    r = rng.randrange(n)
                    body.add(BridgeLiteral(r, rng.choice(sigs[r]), False, rng.random() < 0.3))
            rules.append(BridgeRule(head, frozenset(body)))
        costs = {"add": rng.randint(0, 3), "del": rng.randint(0, 3)}
        contexts.append(EvolvingContext(logic, kb, tuple(rules), costs=costs, name=f"c{i + 1}"))
    return EMCS(tuple(contexts), tuple(observers))


def random_observations(rng: random.Random, M: EMCS, length: int) -> Tuple[Tuple[frozenset, ...], ...]:
    return tuple(
        tuple(_subset(rng, sorted(o.language), 0.4) for o in M.observers) for _ in range(length)
    )


def random_instance(seed: int, max_steps: int = 4):
    """A (system, observations, size) triple determined by ``seed``."""
    rng = random.Random(seed)
    M = random_system(rng)
    m = rng.randint(1, max_steps)
    Obs = random_observations(rng, M, m)
    size = rng.randint(1, m)
    return M, Obs, size
