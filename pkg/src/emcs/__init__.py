"""Evolving multi-context systems with minimal-change selection of evolving equilibria."""

from .equilibrium import (
    DEFAULT_BUDGET,
    EquilibriumWitness,
    SearchStats,
    enumerate_equilibria,
    is_equilibrium,
    oracle_equilibria,
)
from .errors import (
    BudgetExceeded,
    EMCSError,
    InvalidKnowledgeBase,
    ManagementError,
    ParseError,
    SemanticError,
    ShapeError,
    SizeExceedsObservations,
    SyntaxErrorAt,
    UnknownObservationAtom,
    UnknownOperation,
)
from .evolution import (
    EquilibriumTrace,
    check_prefix_property,
    enumerate_evolving_equilibria,
    is_evolving_equilibrium,
    is_valid_trace,
    next_kb,
    trace_from,
)
from .logic import (
    AnswerSetLogic,
    FactStore,
    Logic,
    Rule,
    acc,
    asp_answer_sets,
    fact,
    make_logic,
    rule,
    symdiff,
    validate_kb,
)
from .minimal_change import (
    CostModel,
    DistanceModel,
    belief_distance,
    check_strong,
    check_weak,
    global_cost,
    min_cost,
    min_cost_global,
    min_dist,
    min_eq,
    min_next,
    select_strong,
    select_weak,
    step_cost,
)
from .parser import (
    SystemDescription,
    format_observations,
    format_system,
    parse_element,
    parse_observations,
    parse_system,
)
from .system import (
    EMCS,
    BridgeLiteral,
    BridgeRule,
    EvolvingContext,
    Head,
    ObservationContext,
    OperationalFormula,
    app_next,
    app_now,
    applicable_heads,
    belief,
    builtin_mng,
    later,
    mng,
    now,
    observed,
    replace,
    satisfies,
    split_app,
)

__version__ = "0.1.0"
