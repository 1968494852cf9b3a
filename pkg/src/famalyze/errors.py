"""Exception hierarchy shared by every famalyze module."""

from __future__ import annotations


class FamalyzeError(Exception):
    """Base class for all errors raised by the analyzer."""


class ParseError(FamalyzeError):
    """Malformed source text. Carries a 1-based line/column position."""

    def __init__(self, message: str, line: int = 0, col: int = 0, offset: int = 0):
        self.message = message
        self.line = line
        self.col = col
        self.offset = offset
        super().__init__(f"{line}:{col}: {message}")


class ScopeError(FamalyzeError):
    """Use of an undeclared name, or a feature/variable used in the wrong place."""


class DomainError(FamalyzeError):
    """Feature declared with an empty domain (lo > hi)."""


class CapExceeded(FamalyzeError):
    """An enumeration would exceed its configured cap."""

    def __init__(self, count: int, cap: int, what: str = "configurations"):
        self.count = count
        self.cap = cap
        super().__init__(f"{count} {what} exceed the cap of {cap}")


class UniverseMismatch(FamalyzeError):
    """Binary operation on abstract elements over different variable universes."""


class NotRepresentable(FamalyzeError):
    """A constraint cannot be expressed in the target numerical domain."""


class ShapeMismatch(FamalyzeError):
    """Tuple states built over different configuration sets."""


class AnalysisTimeout(FamalyzeError):
    """The wall-clock budget of an analysis run was exhausted."""


class NonTermination(FamalyzeError):
    """A fixpoint iteration exceeded its iteration guard."""
