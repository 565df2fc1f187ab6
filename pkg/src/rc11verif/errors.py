"""Exception hierarchy shared by all rc11verif modules."""


class VerifError(Exception):
    """Base class for all errors raised by this package."""


class NoWritesOnVariable(VerifError):
    """A memory operation targeted a variable with no writes."""


class UnknownWrite(VerifError):
    """A write identifier does not belong to the state it was used with."""


class DuplicateVariable(VerifError):
    """The same shared variable was initialised twice."""


class EmptyProgram(VerifError):
    """A program (or initial state) declares no shared variables."""


class DomainMismatch(VerifError):
    """Two views defined over different variable sets were merged."""


class NoUncoveredVisibleWrite(VerifError):
    """Every write visible to the acting thread is covered."""


class IllFormedAssertion(VerifError):
    """An assertion atom violates a structural side condition."""


class UnresolvedName(VerifError):
    """An assertion or statement references an undeclared name."""


class ParseError(VerifError):
    """Litmus-file syntax error, with position information."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{line}:{column}: {message}" if line else message)
        self.message = message
        self.line = line
        self.column = column


class ValidationFailed(VerifError):
    """A program failed static validation; diagnostics attached."""

    def __init__(self, diagnostics):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = list(diagnostics)


class BoundExhausted(VerifError):
    """Exploration hit a configured bound before the frontier emptied."""


class UnknownLocation(VerifError):
    """An exclusion marker names a location that does not exist."""
