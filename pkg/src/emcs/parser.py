"""Text formats for system descriptions and observation sequences.

System description (``#`` starts a comment)::

    context c1 kind asp signature { a, b }
    kb c1 { a :- not b. b :- not a. }
    cost c1 { add = 1, del = 2 }
    distance c1 symdiff
    aggregator avg
    observer o1 language { q }
    bridge c1 { next add(a) <- (c1:b), not (o1@q); del(b) <- (o1@q) }

Observation sequence, one step per line::

    step: o1 = { q } ; o2 = { }
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import SemanticError, SyntaxErrorAt, UnknownObservationAtom
from .logic import LOGICS, Rule, render_element, symdiff
from .system import (
    BUILTIN_OPERATIONS,
    DEFAULT_COSTS,
    EMCS,
    BridgeLiteral,
    BridgeRule,
    EvolvingContext,
    Head,
    ObservationContext,
    OperationalFormula,
)

DISTANCES = {"symdiff": symdiff}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<sym>:-|<-|[{}(),;.:@=])
  | (?P<ident>[A-Za-z0-9_]+)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise SyntaxErrorAt(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind in ("sym", "ident"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Cursor:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def at(self, text: str) -> bool:
        return self.peek.text == text and self.peek.kind != "eof"

    def take(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek
        if tok.text != text or tok.kind == "eof":
            raise SyntaxErrorAt(f"expected {text!r}, found {_show(tok)}", tok.line, tok.column)
        return self.take()

    def ident(self, what: str) -> Token:
        tok = self.peek
        if tok.kind != "ident":
            raise SyntaxErrorAt(f"expected {what}, found {_show(tok)}", tok.line, tok.column)
        return self.take()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.take()
            return True
        return False


def _show(tok: Token) -> str:
    return "end of input" if tok.kind == "eof" else repr(tok.text)


# raw element: (head token, positive body tokens, negative body tokens, has_body)
_RawElement = Tuple[Token, Tuple[Token, ...], Tuple[Token, ...], bool]


def _element(cur: _Cursor) -> _RawElement:
    head = cur.ident("atom")
    pos, neg = [], []
    has_body = False
    if cur.accept(":-"):
        has_body = True
        while True:
            if cur.at("not") and cur.tokens[cur.i + 1].kind == "ident":
                cur.take()
                neg.append(cur.ident("atom"))
            else:
                pos.append(cur.ident("atom"))
            if not cur.accept(","):
                break
    return head, tuple(pos), tuple(neg), has_body


def _atom_list(cur: _Cursor) -> List[Token]:
    cur.expect("{")
    atoms = []
    if not cur.at("}"):
        atoms.append(cur.ident("atom"))
        while cur.accept(","):
            atoms.append(cur.ident("atom"))
    cur.expect("}")
    return atoms


@dataclass(frozen=True)
class SystemDescription:
    system: EMCS
    aggregator: str = "max"

    @property
    def context_names(self) -> List[str]:
        return [c.name for c in self.system.contexts]

    @property
    def observer_names(self) -> List[str]:
        return [o.name for o in self.system.observers]


def _parse_statements(text: str):
    cur = _Cursor(tokenize(text))
    statements = []
    while cur.peek.kind != "eof":
        kw = cur.ident("statement keyword")
        if kw.text == "context":
            name = cur.ident("context name")
            cur.expect("kind")
            kind = cur.ident("logic kind")
            cur.expect("signature")
            statements.append((kw, (name, kind, _atom_list(cur))))
        elif kw.text == "observer":
            name = cur.ident("observer name")
            cur.expect("language")
            statements.append((kw, (name, _atom_list(cur))))
        elif kw.text == "kb":
            name = cur.ident("context name")
            cur.expect("{")
            elements = []
            while not cur.at("}"):
                elements.append(_element(cur))
                if not (cur.accept(".") or cur.accept(";")) and not cur.at("}"):
                    tok = cur.peek
                    raise SyntaxErrorAt(f"expected '.' or ';' after kb-element, found {_show(tok)}", tok.line, tok.column)
            cur.expect("}")
            statements.append((kw, (name, elements)))
        elif kw.text == "cost":
            name = cur.ident("context name")
            cur.expect("{")
            entries = []
            if not cur.at("}"):
                while True:
                    op = cur.ident("operation name")
                    cur.expect("=")
                    value = cur.ident("cost")
                    entries.append((op, value))
                    if not cur.accept(","):
                        break
            cur.expect("}")
            statements.append((kw, (name, entries)))
        elif kw.text == "distance":
            statements.append((kw, (cur.ident("context name"), cur.ident("distance name"))))
        elif kw.text == "aggregator":
            statements.append((kw, (cur.ident("aggregator"),)))
        elif kw.text == "bridge":
            name = cur.ident("context name")
            cur.expect("{")
            rules = []
            while not cur.at("}"):
                rules.append(_bridge_rule(cur))
                if not cur.accept(";") and not cur.at("}"):
                    tok = cur.peek
                    raise SyntaxErrorAt(f"expected ';' between bridge rules, found {_show(tok)}", tok.line, tok.column)
            cur.expect("}")
            statements.append((kw, (name, rules)))
        else:
            raise SyntaxErrorAt(f"unknown statement {kw.text!r}", kw.line, kw.column)
    return statements


def _bridge_rule(cur: _Cursor):
    start = cur.peek
    deferred = False
    wrapped = False
    if cur.at("next"):
        cur.take()
        deferred = True
        wrapped = cur.accept("(")
    op = cur.ident("operation name")
    cur.expect("(")
    element = _element(cur)
    cur.accept(".")
    cur.expect(")")
    if wrapped:
        cur.expect(")")
    body = []
    if cur.accept("<-") and not (cur.at(";") or cur.at("}")):
        while True:
            negated = False
            if cur.at("not"):
                cur.take()
                negated = True
            lp = cur.expect("(")
            target = cur.ident("context or observer name")
            sep = cur.take()
            if sep.text not in (":", "@"):
                raise SyntaxErrorAt(f"expected ':' or '@', found {_show(sep)}", sep.line, sep.column)
            atom = cur.ident("atom")
            cur.expect(")")
            body.append((lp, negated, target, sep.text == "@", atom))
            if not cur.accept(","):
                break
    return start, deferred, op, element, body


def _convert_element(raw: _RawElement, kind: str, signature, where: str):
    head, pos, neg, has_body = raw
    atoms = (head,) + pos + neg
    for tok in atoms:
        if tok.text not in signature:
            raise SemanticError(f"atom {tok.text!r} not declared in signature of {where}", tok.line, tok.column)
    if kind == "factstore":
        if has_body:
            raise SemanticError(f"fact-store context {where} only holds atoms", head.line, head.column)
        return head.text
    return Rule(head.text, frozenset(t.text for t in pos), frozenset(t.text for t in neg))


def parse_system(text: str) -> SystemDescription:
    """Parse a system description; errors carry line and column."""
    statements = _parse_statements(text)

    contexts: Dict[str, dict] = {}
    observers: Dict[str, dict] = {}
    aggregator: Optional[str] = None

    for kw, payload in statements:
        if kw.text == "context":
            name, kind, atoms = payload
            if name.text in contexts:
                raise SemanticError(f"duplicate context name {name.text!r}", name.line, name.column)
            if kind.text not in LOGICS:
                raise SemanticError(f"unknown logic kind {kind.text!r}", kind.line, kind.column)
            contexts[name.text] = {
                "kind": kind.text,
                "signature": _unique_atoms(atoms, "signature"),
                "index": len(contexts),
                "kb": None,
                "costs": None,
                "distance": None,
                "bridge": None,
            }
        elif kw.text == "observer":
            name, atoms = payload
            if name.text in observers:
                raise SemanticError(f"duplicate observer name {name.text!r}", name.line, name.column)
            observers[name.text] = {"language": _unique_atoms(atoms, "language"), "index": len(observers)}
        elif kw.text == "aggregator":
            (tok,) = payload
            if aggregator is not None:
                raise SemanticError("aggregator declared twice", kw.line, kw.column)
            if tok.text not in ("max", "avg"):
                raise SemanticError(f"aggregator must be max or avg, not {tok.text!r}", tok.line, tok.column)
            aggregator = tok.text

    if not contexts:
        tok = statements[0][0] if statements else None
        raise SemanticError("at least one evolving context is required", *(tok.line, tok.column) if tok else (1, 1))

    def lookup_context(tok: Token) -> dict:
        if tok.text not in contexts:
            raise SemanticError(f"undeclared context {tok.text!r}", tok.line, tok.column)
        return contexts[tok.text]

    for kw, payload in statements:
        if kw.text == "kb":
            name, elements = payload
            ctx = lookup_context(name)
            if ctx["kb"] is not None:
                raise SemanticError(f"kb of {name.text!r} declared twice", kw.line, kw.column)
            kb = set()
            for raw in elements:
                kb.add(_convert_element(raw, ctx["kind"], ctx["signature"], name.text))
            ctx["kb"] = frozenset(kb)
        elif kw.text == "cost":
            name, entries = payload
            ctx = lookup_context(name)
            if ctx["costs"] is not None:
                raise SemanticError(f"costs of {name.text!r} declared twice", kw.line, kw.column)
            costs = dict(DEFAULT_COSTS)
            seen = set()
            for op, value in entries:
                if op.text not in BUILTIN_OPERATIONS:
                    raise SemanticError(f"unknown operation {op.text!r}", op.line, op.column)
                if op.text in seen:
                    raise SemanticError(f"cost of {op.text!r} given twice", op.line, op.column)
                if not value.text.isdigit():
                    raise SemanticError(f"cost must be a natural number, not {value.text!r}", value.line, value.column)
                seen.add(op.text)
                costs[op.text] = int(value.text)
            ctx["costs"] = costs
        elif kw.text == "distance":
            name, dist = payload
            ctx = lookup_context(name)
            if ctx["distance"] is not None:
                raise SemanticError(f"distance of {name.text!r} declared twice", kw.line, kw.column)
            if dist.text not in DISTANCES:
                raise SemanticError(f"unknown distance {dist.text!r}", dist.line, dist.column)
            ctx["distance"] = dist.text
        elif kw.text == "bridge":
            name, rules = payload
            ctx = lookup_context(name)
            if ctx["bridge"] is None:
                ctx["bridge"] = []
            for start, deferred, op, element, body in rules:
                if op.text not in BUILTIN_OPERATIONS:
                    raise SemanticError(f"unknown operation {op.text!r}", op.line, op.column)
                arg = _convert_element(element, ctx["kind"], ctx["signature"], name.text)
                literals = []
                for lp, negated, target, is_obs, atom in body:
                    table = observers if is_obs else contexts
                    what = "observer" if is_obs else "context"
                    if target.text not in table:
                        raise SemanticError(f"undeclared {what} {target.text!r}", target.line, target.column)
                    entry = table[target.text]
                    allowed = entry["language"] if is_obs else entry["signature"]
                    if atom.text not in allowed:
                        raise SemanticError(f"atom {atom.text!r} not declared for {what} {target.text!r}", atom.line, atom.column)
                    literals.append(BridgeLiteral(entry["index"], atom.text, observation=is_obs, negated=negated))
                ctx["bridge"].append(BridgeRule(Head(OperationalFormula(op.text, arg), deferred), frozenset(literals)))

    built = []
    for name, ctx in contexts.items():
        built.append(
            EvolvingContext(
                logic=LOGICS[ctx["kind"]](ctx["signature"]),
                kb=ctx["kb"] or frozenset(),
                bridge_rules=tuple(ctx["bridge"] or ()),
                costs=ctx["costs"] or dict(DEFAULT_COSTS),
                distance=DISTANCES[ctx["distance"] or "symdiff"],
                name=name,
            )
        )
    obs = [ObservationContext(o["language"], frozenset(), name) for name, o in observers.items()]
    return SystemDescription(EMCS(tuple(built), tuple(obs)), aggregator or "max")


def _unique_atoms(atoms: List[Token], what: str) -> frozenset:
    seen = set()
    for tok in atoms:
        if tok.text in seen:
            raise SemanticError(f"atom {tok.text!r} repeated in {what}", tok.line, tok.column)
        seen.add(tok.text)
    return frozenset(seen)


def _distance_name(fn) -> str:
    for name, f in DISTANCES.items():
        if f is fn:
            return name
    raise ValueError(f"distance {fn!r} has no registered name")


def format_element(element) -> str:
    return render_element(element).rstrip(".")


def format_literal(M: EMCS, lit: BridgeLiteral) -> str:
    if lit.observation:
        text = f"({M.observers[lit.target].name}@{lit.atom})"
    else:
        text = f"({M.contexts[lit.target].name}:{lit.atom})"
    return f"not {text}" if lit.negated else text


def format_bridge_rule(M: EMCS, r: BridgeRule) -> str:
    head = f"{r.head.inner.op}({format_element(r.head.inner.arg)})"
    if r.head.deferred:
        head = f"next {head}"
    body = sorted(format_literal(M, lit) for lit in r.body)
    return f"{head} <- {', '.join(body)}" if body else head


def format_system(desc: SystemDescription) -> str:
    """Canonical text of a system description; parsing it gives back an equal description."""
    M = desc.system
    lines = []
    for o in M.observers:
        lines.append(f"observer {o.name} language {{ {', '.join(sorted(o.language))} }}")
    for c in M.contexts:
        lines.append(f"context {c.name} kind {c.logic.kind} signature {{ {', '.join(sorted(c.logic.signature))} }}")
    lines.append(f"aggregator {desc.aggregator}")
    for c in M.contexts:
        lines.append("")
        if c.kb:
            elements = " ".join(f"{render_element(e).rstrip('.')}." for e in sorted(c.kb, key=render_element))
            lines.append(f"kb {c.name} {{ {elements} }}")
        costs = ", ".join(f"{op} = {c.costs[op]}" for op in sorted(c.costs))
        lines.append(f"cost {c.name} {{ {costs} }}")
        lines.append(f"distance {c.name} {_distance_name(c.distance)}")
        if c.bridge_rules:
            lines.append(f"bridge {c.name} {{")
            for k, r in enumerate(c.bridge_rules):
                sep = ";" if k < len(c.bridge_rules) - 1 else ""
                lines.append(f"  {format_bridge_rule(M, r)}{sep}")
            lines.append("}")
    return "\n".join(lines) + "\n"


def parse_observations(text: str, desc: SystemDescription) -> Tuple[Tuple[frozenset, ...], ...]:
    """Parse ``step:`` lines into an observation sequence shaped for ``desc``."""
    M = desc.system
    index = {o.name: k for k, o in enumerate(M.observers)}
    cur = _Cursor(tokenize(text))
    steps = []
    while cur.peek.kind != "eof":
        cur.expect("step")
        cur.expect(":")
        current = [frozenset()] * len(M.observers)
        given = set()
        while not cur.at("step") and cur.peek.kind != "eof":
            name = cur.ident("observer name")
            if name.text not in index:
                raise SemanticError(f"undeclared observer {name.text!r}", name.line, name.column)
            if name.text in given:
                raise SemanticError(f"observer {name.text!r} given twice in one step", name.line, name.column)
            given.add(name.text)
            cur.expect("=")
            atoms = _atom_list(cur)
            k = index[name.text]
            for tok in atoms:
                if tok.text not in M.observers[k].language:
                    raise UnknownObservationAtom(
                        f"{tok.text!r} not in language of observer {name.text!r}", tok.line, tok.column
                    )
            current[k] = frozenset(t.text for t in atoms)
            if not cur.accept(";"):
                break
        steps.append(tuple(current))
    return tuple(steps)


def format_observations(Obs, desc: SystemDescription) -> str:
    names = desc.observer_names
    lines = []
    for step in Obs:
        parts = [f"{name} = {{ {', '.join(sorted(o))} }}" for name, o in zip(names, step)]
        lines.append("step: " + " ; ".join(parts) if parts else "step:")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_element(text: str, context: EvolvingContext):
    """Parse one kb-element (``p`` or ``h :- b, not c.``) for ``context``."""
    cur = _Cursor(tokenize(text))
    raw = _element(cur)
    cur.accept(".")
    if cur.peek.kind != "eof":
        tok = cur.peek
        raise SyntaxErrorAt(f"trailing input {_show(tok)}", tok.line, tok.column)
    return _convert_element(raw, context.logic.kind, context.logic.signature, context.name)


__all__ = [
    "DISTANCES",
    "SystemDescription",
    "format_observations",
    "format_system",
    "parse_element",
    "parse_observations",
    "parse_system",
    "tokenize",
]
