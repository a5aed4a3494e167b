import pytest

from emcs import (
    EMCS,
    AnswerSetLogic,
    BridgeRule,
    EvolvingContext,
    FactStore,
    ObservationContext,
    belief,
    later,
    now,
    observed,
    rule,
)

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def two_rule_system():
    """Instantaneous and persistent add(p), both triggered by observing q."""
    ctx = EvolvingContext(
        FactStore({"p"}),
        bridge_rules=[
            BridgeRule(now("add", "p"), [observed(0, "q")]),
            BridgeRule(later("add", "p"), [observed(0, "q")]),
        ],
        name="c1",
    )
    return EMCS([ctx], [ObservationContext({"q"}, name="o1")])


@pytest.fixture
def deferred_only_system():
    ctx = EvolvingContext(FactStore({"p"}), bridge_rules=[BridgeRule(later("add", "p"), [observed(0, "q")])], name="c1")
    return EMCS([ctx], [ObservationContext({"q"}, name="o1")])


@pytest.fixture
def fork_system():
    """Observing q both adds and deletes p next, so the kb forks."""
    ctx = EvolvingContext(
        FactStore({"p"}),
        bridge_rules=[
            BridgeRule(later("add", "p"), [observed(0, "q")]),
            BridgeRule(later("del", "p"), [observed(0, "q")]),
        ],
        name="c1",
    )
    return EMCS([ctx], [ObservationContext({"q"}, name="o1")])


@pytest.fixture
def greedy_trap_system():
    """The cheapest step-1 equilibrium leaves no equilibrium at step 2."""
    logic = AnswerSetLogic({"p", "r", "x"})
    ctx = EvolvingContext(
        logic,
        kb={rule("x", neg=["x", "p"])},
        bridge_rules=[
            BridgeRule(now("add", rule("p")), [observed(0, "q")]),
            BridgeRule(now("add", rule("r")), [belief(0, "r")]),
            BridgeRule(later("add", rule("p")), [belief(0, "r")]),
        ],
        name="c1",
    )
    return EMCS([ctx], [ObservationContext({"q"}, name="o1")])
