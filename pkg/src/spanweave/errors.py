"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class SpanweaveError(Exception):
    exit_code = 1


class ParseError(SpanweaveError):
    """Malformed JSON or document input."""

    exit_code = 2


class InvariantError(SpanweaveError):
    """A structural invariant is violated (zero weight stored, epsilon cycle, ...)."""

    exit_code = 3


class InvalidValueError(SpanweaveError):
    """A value does not belong to the semiring's domain."""

    exit_code = 3


class CapabilityError(SpanweaveError):
    """The semiring lacks a flag the operation needs."""

    exit_code = 4


class PreconditionError(SpanweaveError):
    exit_code = 4


class SchemaError(SpanweaveError):
    """Mismatched variable sets, semirings or alphabets."""

    exit_code = 4


class FormatError(SpanweaveError):
    exit_code = 4


class AmbiguityError(SpanweaveError):
    """An automaton claimed to be unambiguous is not."""

    exit_code = 4


class ResourceError(SpanweaveError):
    """A configured size or run cap was exceeded."""

    exit_code = 5
