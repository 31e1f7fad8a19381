"""Exception types shared across the toolkit.

Solver outcomes (sat/unsat/unknown) are ordinary return values, not
exceptions; everything here signals a broken input or a broken contract.
"""

from __future__ import annotations


class CtlfoError(Exception):
    """Base class for all toolkit errors."""


class ParseError(CtlfoError):
    """Raised on malformed input text.

    `position` is a 1-based column in the input; `expected` describes
    what the parser was looking for.
    """

    def __init__(self, position: int, expected: str, text: str = ""):
        self.position = position
        self.expected = expected
        self.text = text
        super().__init__(f"column {position}: expected {expected}")


class UnboundVariable(CtlfoError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound variable: {name}")


class UndeclaredVariable(CtlfoError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"undeclared variable: {name}")


class ShadowingError(CtlfoError):
    def __init__(self, identifier: str, location: str):
        self.identifier = identifier
        self.location = location
        super().__init__(f"identifier {identifier!r} rebound at {location}")


class OpenFormula(CtlfoError):
    def __init__(self, names):
        self.names = tuple(sorted(names))
        super().__init__(f"formula has free data variables: {', '.join(self.names)}")


class UnsupportedConstruct(CtlfoError):
    pass


class BoundTooLarge(CtlfoError):
    def __init__(self, count: int, ceiling: int, what: str = "ground atoms"):
        self.count = count
        self.ceiling = ceiling
        super().__init__(f"{what}: {count} exceeds ceiling {ceiling}")


class NotExportable(CtlfoError):
    def __init__(self, reason: str, clause_index: int | None = None):
        self.reason = reason
        self.clause_index = clause_index
        where = f" (clause {clause_index})" if clause_index is not None else ""
        super().__init__(f"not exportable{where}: {reason}")


class TotalityRequired(CtlfoError):
    def __init__(self, state):
        self.state = state
        super().__init__(f"system is not total in bound: state {state} has no successor")


class MissingTemplate(CtlfoError):
    def __init__(self, clause_index: int, var: str):
        self.clause_index = clause_index
        self.var = var
        super().__init__(f"no witness template for {var!r} in clause {clause_index}")
