"""Exception types shared across the planner."""
from __future__ import annotations


class PlannerError(Exception):
    """Base class for every error raised by treeplan."""


class ParseError(PlannerError, ValueError):
    pass


class UnknownNode(PlannerError, KeyError):
    pass


class DegenerateInput(PlannerError, ValueError):
    pass


class DomainError(PlannerError, ValueError):
    pass


class UnscoredNode(PlannerError):
    pass


class EmptyBatch(PlannerError):
    """Every sample in a proposal batch failed to parse."""


class BackendUnavailable(PlannerError):
    """The live backend could not be reached after retries."""


class HttpStatus(BackendUnavailable):
    def __init__(self, code: int, body: str = ""):
        self.code = code
        self.body = body[:200]
        super().__init__(f"HTTP {code}: {self.body}")


class BudgetExceeded(PlannerError):
    pass


class SearchAborted(PlannerError):
    """A proposer error stopped a search; ``result`` carries the partial trace."""

    def __init__(self, cause: Exception, result):
        self.cause = cause
        self.result = result
        super().__init__(f"search aborted: {cause!r}")
