import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emcs.errors import ParseError, SemanticError, SyntaxErrorAt, UnknownObservationAtom
from emcs.parser import (
    SystemDescription,
    format_observations,
    format_system,
    parse_element,
    parse_observations,
    parse_system,
)
from emcs.logic import Rule
from emcs.testing import random_instance
from pathlib import Path

SAMPLES = Path(__file__).resolve().parent.parent / "samples"

GRAMMAR_EXAMPLE = """\
# every statement kind once
context c1 kind asp signature { a, b, p }
context c2 kind factstore signature { p, q }
kb c1 { a :- not b. b :- not a }
kb c2 { p. }
cost c1 { add = 2, del = 1 }
distance c2 symdiff
aggregator avg
observer o1 language { q, r }
bridge c1 { next add(p :- a) <- (c2:p), not (o1@q) ; del(b.) <- (o1@r) }
bridge c2 { next(del(p)) <- not (c1:a) }
"""


def test_grammar_example_parses():
    desc = parse_system(GRAMMAR_EXAMPLE)
    M = desc.system
    assert desc.context_names == ["c1", "c2"]
    assert desc.observer_names == ["o1"]
    assert desc.aggregator == "avg"
    c1, c2 = M.contexts
    assert c1.logic.kind == "asp" and c2.logic.kind == "factstore"
    assert c1.kb == frozenset({Rule("a", neg=frozenset({"b"})), Rule("b", neg=frozenset({"a"}))})
    assert c2.kb == frozenset({"p"})
    assert c1.costs["add"] == 2 and c1.costs["del"] == 1
    assert c2.costs == {"add": 1, "del": 1}
    (deferred, instant) = sorted(c1.bridge_rules, key=lambda r: not r.head.deferred)
    assert deferred.head.deferred and str(deferred.head.inner) == "add(p :- a)"
    assert {(l.target, l.atom, l.observation, l.negated) for l in deferred.body} == {(1, "p", False, False), (0, "q", True, True)}
    assert not instant.head.deferred


def test_default_aggregator_is_max():
    assert parse_system("context c kind factstore signature { p }").aggregator == "max"


@pytest.mark.parametrize(
    "text, kind, line, column",
    [
        ("", SemanticError, 1, 1),
        ("# only a comment\n", SemanticError, 1, 1),
        ("context c kind factstore signature { p }\nbridge c { add(p) <- (o9@q) }", SemanticError, 2, 23),
        ("context c kind factstore signature { p }\nkb c { z. }", SemanticError, 2, 8),
        ("context c kind factstore signature { p }\ncontext c kind asp signature { p }", SemanticError, 2, 9),
        ("context c kind prolog signature { p }", SemanticError, 1, 16),
        ("context c kind factstore signature { p }\ncost c { add = -1 }", SyntaxErrorAt, 2, 16),
        ("context c kind factstore signature { p }\nbridge c { add(p) <- (c:p) (c:p) }", SyntaxErrorAt, 2, 28),
        ("context c kind factstore signature { p ", SyntaxErrorAt, 1, 40),
        ("context c kind factstore signature { p }\nbridge c { frob(p) }", SemanticError, 2, 12),
        ("context c kind factstore signature { p }\naggregator median", SemanticError, 2, 12),
        ("context c kind factstore signature { p }\nkb c { p :- p. }", SemanticError, 2, 8),
        ("context c kind factstore signature { p $ }", SyntaxErrorAt, 1, 40),
    ],
)
def test_errors_carry_position(text, kind, line, column):
    with pytest.raises(kind) as info:
        parse_system(text)
    err = info.value
    assert isinstance(err, ParseError)
    assert (err.line, err.column) == (line, column), str(err)
    assert err.reason


def test_observations_examples():
    desc = parse_system("observer o1 language { q }\ncontext c kind factstore signature { p }")
    assert parse_observations("step: o1 = {q}", desc) == ((frozenset({"q"}),),)
    assert parse_observations("step: o1 = {}", desc) == ((frozenset(),),)
    assert parse_observations("step:\n# skipped\nstep: o1 = { q }\n", desc) == ((frozenset(),), (frozenset({"q"}),))
    with pytest.raises(UnknownObservationAtom) as info:
        parse_observations("step: o1 = {q}\nstep: o1 = { x }", desc)
    assert (info.value.line, info.value.column) == (2, 14)
    with pytest.raises(SemanticError):
        parse_observations("step: o2 = {}", desc)
    with pytest.raises(SyntaxErrorAt):
        parse_observations("o1 = {q}", desc)


def test_samples_round_trip():
    for path in sorted(SAMPLES.glob("*.emcs")):
        desc = parse_system(path.read_text(encoding="utf-8"))
        again = parse_system(format_system(desc))
        assert again == desc
        assert format_system(again) == format_system(desc)
        obs_text = path.with_suffix(".obs").read_text(encoding="utf-8")
        Obs = parse_observations(obs_text, desc)
        assert parse_observations(format_observations(Obs, desc), desc) == Obs


@pytest.mark.parametrize("seed", range(150))
def test_random_round_trip(seed):
    M, Obs, _ = random_instance(seed)
    desc = SystemDescription(M, "avg" if seed % 2 else "max")
    text = format_system(desc)
    assert parse_system(text) == desc
    assert parse_observations(format_observations(Obs, desc), desc) == tuple(Obs)


def test_parse_element():
    M = parse_system(GRAMMAR_EXAMPLE).system
    assert parse_element("p :- a, not b.", M.contexts[0]) == Rule("p", frozenset({"a"}), frozenset({"b"}))
    assert parse_element("q", M.contexts[1]) == "q"
    with pytest.raises(SyntaxErrorAt):
        parse_element("q q", M.contexts[1])


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet="contexkdbrug{}(),;:@.<-= \nabpq#", max_size=80))
def test_garbage_never_crashes_with_unexpected_errors(text):
    try:
        parse_system(text)
    except ParseError as err:
        assert err.line >= 1 and err.column >= 1
