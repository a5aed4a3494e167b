"""Exception hierarchy for the eMCS engine."""

from __future__ import annotations


class EMCSError(Exception):
    """Base class for every error raised by this package."""


class InvalidKnowledgeBase(EMCSError):
    """A knowledge base is not a member of its logic's KB set."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class UnknownOperation(EMCSError):
    pass


class ShapeError(EMCSError):
    """A belief state, observation or configuration does not fit the system."""


class ManagementError(EMCSError):
    """A management function returned no successor knowledge base."""


class BudgetExceeded(EMCSError):
    def __init__(self, what: str, needed: int, budget: int):
        self.needed = needed
        self.budget = budget
        super().__init__(f"{what}: {needed} candidates exceed budget {budget}")


class SizeExceedsObservations(EMCSError):
    pass


class ParseError(EMCSError):
    """Raised by the system and observation parsers; carries a source position."""

    kind = "parse-error"

    def __init__(self, reason: str, line: int = 0, column: int = 0):
        self.reason = reason
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {self.kind}: {reason}")


class SyntaxErrorAt(ParseError):
    kind = "syntax-error"


class SemanticError(ParseError):
    kind = "semantic-error"


class UnknownObservationAtom(ParseError):
    kind = "unknown-observation-atom"
