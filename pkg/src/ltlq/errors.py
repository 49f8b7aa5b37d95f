"""Exception hierarchy shared across the package."""


class LtlqError(Exception):
    """Base class for all errors raised by ltlq."""


class ParseError(LtlqError):
    """Malformed input text (LTL formula, LDBA file, MDP file, config)."""

    def __init__(self, message, position=None, line=None):
        loc = ""
        if line is not None:
            loc = f" (line {line})"
        elif position is not None:
            loc = f" (at position {position})"
        super().__init__(message + loc)
        self.position = position
        self.line = line


class ValidationError(LtlqError):
    """Structurally well-formed input violating a model invariant."""


class EpsilonCycleError(LtlqError):
    """A product policy whose epsilon-choices chase each other in a cycle."""
