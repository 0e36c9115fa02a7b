"""Exception hierarchy shared by every module."""

from __future__ import annotations


class RdlError(Exception):
    """Base class for all library errors."""


class InvalidPairError(RdlError, ValueError):
    """Colour queried for a loop (m, n) with m == n, or a non-positive vertex."""


class OutOfDomainError(RdlError, ValueError):
    """Vertex or pair lies outside the domain of an explicit colouring."""


class ParseError(RdlError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BudgetExceeded(RdlError):
    """An exact search could not finish inside its budget.

    ``lower_bound`` / ``upper_bound`` carry whatever partial answer the search
    had in hand (a path, a cover, ...), or None.
    """

    def __init__(self, message: str, lower_bound=None, upper_bound=None):
        super().__init__(message)
        self.lower_bound = lower_bound
        self.upper_bound = upper_bound


class DepthCapReached(BudgetExceeded):
    """A path of length ``cap`` exists, so the longest length is only known to be >= cap."""

    def __init__(self, cap: int, witness):
        super().__init__(
            f"search reached depth cap {cap}; longest path has length >= {cap}",
            lower_bound=witness,
        )
        self.cap = cap
        self.witness = witness


class PreconditionViolation(RdlError, ValueError):
    def __init__(self, message: str, edge: tuple[int, int] | None = None):
        super().__init__(message)
        self.edge = edge


class SpliceIncomplete(RdlError):
    def __init__(self, message: str, partial):
        super().__init__(message)
        self.partial = partial


class NotCrStructure(RdlError):
    """No c_r structure was found within the exceptional-set budget."""

    def __init__(self, message: str, residual_violations: int = 0, exceptional=()):
        super().__init__(message)
        self.residual_violations = residual_violations
        self.exceptional = tuple(exceptional)


class RedPathTooLong(NotCrStructure):
    """A red path of length >= r survives every admissible exceptional set."""


class HarnessInfeasible(RdlError):
    def __init__(self, message: str, stats: dict):
        super().__init__(message)
        self.stats = stats
