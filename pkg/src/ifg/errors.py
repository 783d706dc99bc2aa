"""Exception types shared across the package."""

from __future__ import annotations


class IfgError(Exception):
    """Base class for all errors raised by this package."""


class GrammarSyntaxError(IfgError):
    """A grammar file could not be tokenized or parsed."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class FsaSyntaxError(IfgError):
    """An automaton file could not be parsed."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.message = message
        self.line = line


class GrammarValidationError(IfgError):
    """A grammar violates the shape required of reference grammars.

    The individual violations are available on ``report``.
    """

    def __init__(self, report):
        lines = "; ".join(str(v) for v in report)
        super().__init__(f"invalid reference grammar: {lines}")
        self.report = list(report)


class NoParseError(IfgError):
    """The input is not accepted by the context-free backbone."""


class CyclicGrammarError(IfgError):
    """An operation that requires an acyclic grammar met a cycle."""

    def __init__(self, message: str, witness=None):
        if witness:
            message = f"{message} (cycle: {' -> '.join(str(w) for w in witness)})"
        super().__init__(message)
        self.witness = tuple(witness) if witness else None


class CyclicSpecializationError(CyclicGrammarError):
    """The chart read as a grammar is cyclic and unfit for transformation.

    The offending grammar is still built and attached as ``grammar`` so it
    can be inspected.
    """

    def __init__(self, message: str, witness=None, grammar=None):
        super().__init__(message, witness)
        self.grammar = grammar


class GrammarKindError(IfgError):
    """A pipeline stage received a grammar of the wrong kind."""


class NotStandardizedError(IfgError):
    """An operation requiring standardized constraints got raw ones."""


class UnsatisfiableError(IfgError):
    """A structure was requested for an unsatisfiable constraint set."""


class TransformError(IfgError):
    """Partial evaluation was requested at an invalid position."""


class InvariantViolationError(IfgError):
    """An internal invariant failed; indicates a certification bug."""
