"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class LiftCodesError(Exception):
    """Base class for every error raised by this package."""


class UsageError(LiftCodesError, ValueError):
    """Invalid arguments: mismatched contexts, out-of-range degrees, bad shapes."""


class ParameterError(UsageError):
    """A construction was asked for parameters that violate one of its constraints."""

    def __init__(self, constraint: str, detail: str = "") -> None:
        self.constraint = constraint
        msg = f"infeasible parameters: {constraint} violated"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class GuardError(LiftCodesError):
    """An exhaustive computation would exceed its configured size limit."""


class DecodeFailure(LiftCodesError):
    """A decoder found no codeword within its radius."""
