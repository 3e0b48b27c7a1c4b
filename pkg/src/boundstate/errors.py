"""Exception hierarchy shared by all boundstate modules."""

from __future__ import annotations


class BoundStateError(Exception):
    """Base class for every error raised by this package."""


class ExpressionSyntaxError(BoundStateError):
    """Malformed expression text.

    ``position`` is the 0-based character offset where parsing failed.
    """

    def __init__(self, message: str, position: int, source: str = ""):
        self.position = position
        self.source = source
        super().__init__(f"{message} (at position {position})")


class UnknownIdentifier(ExpressionSyntaxError):
    """A name outside the fixed function/constant whitelist."""


class DomainError(BoundStateError, ValueError):
    def __init__(self, message: str, subexpression: str = "", point=None):
        self.subexpression = subexpression
        self.point = point
        super().__init__(message)


class DerivativeUndefined(DomainError):
    """Derivative requested at a kink (``abs`` at 0)."""


class NotNormalizable(BoundStateError):
    def __init__(self, message: str, diagnostic: str = ""):
        self.diagnostic = diagnostic
        super().__init__(message)


class UnknownName(BoundStateError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class NodeInDomain(BoundStateError):
    def __init__(self, message: str, location: float):
        self.location = location
        super().__init__(message)


class SolverError(BoundStateError):
    """Base for eigensolver failures."""


class BracketError(SolverError):
    def __init__(self, message: str, nodes_lo: int, nodes_hi: int):
        self.nodes_lo = nodes_lo
        self.nodes_hi = nodes_hi
        super().__init__(message)


class BoxTooSmall(SolverError):
    pass


class NoConvergence(SolverError):
    pass


class ManifestError(BoundStateError):
    """Collects every validation problem found in a manifest."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid manifest:\n  " + "\n  ".join(self.problems))
