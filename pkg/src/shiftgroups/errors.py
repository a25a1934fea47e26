"""Exception types shared across the package."""

from __future__ import annotations


class ShiftGroupsError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ShiftGroupsError):
    """A text input could not be parsed; carries a source:line prefix."""

    def __init__(self, message: str, source: str = "<string>", line: int | None = None):
        self.source = source
        self.line = line
        where = source if line is None else f"{source}:{line}"
        super().__init__(f"{where}: {message}")


class InadmissibleGraph(ShiftGroupsError):
    """Graph is not diconnected or is circular."""


class InvalidPath(ShiftGroupsError):
    pass


class InvalidClopen(ShiftGroupsError):
    pass


class InvalidElement(ShiftGroupsError):
    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class GroupMismatch(ShiftGroupsError):
    pass


class RestrictionMismatch(ShiftGroupsError):
    pass


class ComputationRefused(ShiftGroupsError):
    """Base for refusals that are not bugs: caps, unsupported inputs."""


class UnsupportedInfinite(ComputationRefused):
    pass


class GroupTooLarge(ComputationRefused):
    pass


class ClosureTooLarge(ComputationRefused):
    pass


class SearchBoundExhausted(ComputationRefused):
    pass


class DeterminantUnreachable(ComputationRefused):
    pass


class VerificationError(ShiftGroupsError):
    """An internal self-check failed; the result is never returned."""
