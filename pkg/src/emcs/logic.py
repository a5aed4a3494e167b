"""Logics ⟨KB, BS, ACC⟩ with finite signatures.

Two concrete logics are provided:

* :class:`FactStore` - a knowledge base is a set of atoms and its only
  acceptable belief set is that same set.
* :class:`AnswerSetLogic` - a knowledge base is a set of propositional
  normal rules; acceptable belief sets are its answer sets, found by
  checking every interpretation over the signature against the least
  model of its reduct.

Belief sets are plain ``frozenset[str]``. Knowledge bases are
``frozenset`` of elements (atoms for the fact store, :class:`Rule` for
answer-set programs).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import AbstractSet, FrozenSet, Hashable, Iterable, List

from .errors import InvalidKnowledgeBase

ATOM_RE = re.compile(r"^[A-Za-z0-9_]+$")

BeliefSet = FrozenSet[str]
KnowledgeBase = FrozenSet[Hashable]


def is_atom(token) -> bool:
    return isinstance(token, str) and bool(ATOM_RE.match(token))


@dataclass(frozen=True, order=True)
class Rule:
    """Normal rule ``head :- pos, not neg.``; a fact has empty bodies."""

    head: str
    pos: FrozenSet[str] = frozenset()
    neg: FrozenSet[str] = frozenset()

    def atoms(self) -> FrozenSet[str]:
        return frozenset({self.head}) | self.pos | self.neg

    def __str__(self) -> str:
        body = sorted(self.pos) + [f"not {a}" for a in sorted(self.neg)]
        if not body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(body)}."


def fact(atom: str) -> Rule:
    return Rule(atom)


def rule(head: str, pos: Iterable[str] = (), neg: Iterable[str] = ()) -> Rule:
    return Rule(head, frozenset(pos), frozenset(neg))


@dataclass(frozen=True)
class Logic:
    signature: FrozenSet[str] = field(default_factory=frozenset)

    kind = "abstract"

    def __post_init__(self):
        object.__setattr__(self, "signature", frozenset(self.signature))
        bad = sorted(a for a in self.signature if not is_atom(a))
        if bad:
            raise ValueError(f"malformed signature atoms: {bad}")

    def element_violations(self, element) -> List[str]:
        raise NotImplementedError

    def validate(self, kb: AbstractSet) -> List[str]:
        report = []
        for element in sorted(kb, key=render_element):
            report.extend(self.element_violations(element))
        return report

    def accept(self, kb: KnowledgeBase) -> FrozenSet[BeliefSet]:
        raise NotImplementedError

    def belief_sets(self) -> List[BeliefSet]:
        """All of BS, i.e. every subset of the signature, in canonical order."""
        return sorted(_powerset(self.signature), key=belief_set_key)


class FactStore(Logic):
    kind = "factstore"

    def element_violations(self, element) -> List[str]:
        if not is_atom(element):
            return [f"{element!r}: not an atom"]
        if element not in self.signature:
            return [f"{element} not in signature"]
        return []

    def accept(self, kb: KnowledgeBase) -> FrozenSet[BeliefSet]:
        return frozenset({frozenset(kb)})


class AnswerSetLogic(Logic):
    kind = "asp"

    def element_violations(self, element) -> List[str]:
        if not isinstance(element, Rule):
            return [f"{element!r}: not a rule"]
        return [
            f"{a} not in signature (rule {element})"
            for a in sorted(element.atoms())
            if a not in self.signature
        ]

    def accept(self, kb: KnowledgeBase) -> FrozenSet[BeliefSet]:
        return asp_answer_sets(kb, self.signature)


LOGICS = {FactStore.kind: FactStore, AnswerSetLogic.kind: AnswerSetLogic}


def make_logic(kind: str, signature: Iterable[str]) -> Logic:
    try:
        return LOGICS[kind](frozenset(signature))
    except KeyError:
        raise ValueError(f"unknown logic kind {kind!r}") from None


def validate_kb(logic: Logic, kb: AbstractSet) -> List[str]:
    """Return the violations that keep ``kb`` out of the logic's KB set.

    An empty list means the knowledge base is valid.
    """
    return logic.validate(kb)


@lru_cache(maxsize=1 << 16)
def _acc_cached(logic: Logic, kb: KnowledgeBase) -> FrozenSet[BeliefSet]:
    violations = logic.validate(kb)
    if violations:
        raise InvalidKnowledgeBase(violations)
    return logic.accept(kb)


def acc(logic: Logic, kb: AbstractSet) -> FrozenSet[BeliefSet]:
    """Acceptable belief sets of ``kb`` under ``logic``.

    Raises :class:`InvalidKnowledgeBase` if ``kb`` uses atoms outside the
    signature or elements of the wrong shape.
    """
    return _acc_cached(logic, frozenset(kb))


def _least_model(rules) -> FrozenSet[str]:
    model = set()
    changed = True
    while changed:
        changed = False
        for head, pos in rules:
            if head not in model and pos <= model:
                model.add(head)
                changed = True
    return frozenset(model)


def asp_answer_sets(program: AbstractSet[Rule], signature: AbstractSet[str]) -> FrozenSet[BeliefSet]:
    """Answer sets of a normal program, by exhaustive reduct checking.

    Every interpretation ``I`` over ``signature`` is tested: ``I`` is an
    answer set iff it equals the least model of the reduct ``P^I``.
    """
    atoms = sorted(signature)
    rules = list(program)
    found = set()
    for mask in range(1 << len(atoms)):
        interp = frozenset(a for k, a in enumerate(atoms) if mask >> k & 1)
        reduct = [(r.head, r.pos) for r in rules if not (r.neg & interp)]
        if _least_model(reduct) == interp:
            found.add(interp)
    return frozenset(found)


def _powerset(atoms: AbstractSet[str]):
    ordered = sorted(atoms)
    for mask in range(1 << len(ordered)):
        yield frozenset(a for k, a in enumerate(ordered) if mask >> k & 1)


def powerset(atoms: AbstractSet[str]) -> List[FrozenSet[str]]:
    return sorted(_powerset(atoms), key=belief_set_key)


def belief_set_key(bs: AbstractSet[str]):
    return tuple(sorted(bs))


def render_element(element) -> str:
    """Canonical text of a kb-element (``p`` or ``h :- b, not c.``)."""
    return str(element)


def kb_key(kb: AbstractSet):
    return tuple(sorted(render_element(e) for e in kb))


def symdiff(left: AbstractSet[str], right: AbstractSet[str]) -> int:
    """Default belief-set distance: size of the symmetric difference."""
    return len(frozenset(left) ^ frozenset(right))
