"""Exception hierarchy shared by every module.

The CLI maps each class onto a stable exit code, so callers can tell a bad
input apart from a solver failure or an exhausted resource budget.
"""


class GameError(Exception):
    """Base class for all errors raised by this package."""


class MalformedInputError(GameError, ValueError):
    """Input has the wrong shape, range or type."""


class InfeasibleStrategySpaceError(GameError):
    """A player's strategy polytope is empty."""


class ResourceLimitError(GameError):
    """An explicit size cap or round budget was exceeded."""


class OracleContractError(GameError):
    """A vertex oracle broke its exactness contract."""


class NotAMemberError(GameError):
    """A point lies outside a strategy polytope.

    Carries the separating hyperplane ``offset + normal . x >= 0`` that every
    vertex satisfies and the point violates.
    """

    def __init__(self, message, offset, normal):
        super().__init__(message)
        self.offset = offset
        self.normal = tuple(normal)
