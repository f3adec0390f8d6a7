"""Exception hierarchy shared by all isocap modules."""


class IsocapError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(IsocapError):
    """An argument lies outside the admissible domain of an operation."""


class NonConvergence(IsocapError):
    """An iterative numerical procedure exhausted its budget."""


class NoBracket(IsocapError):
    """Root finding was called without a sign change at the endpoints."""


class InsufficientData(IsocapError):
    """A sequence operation received fewer entries than it requires."""


class ProfileSyntaxError(IsocapError):
    """Malformed profile expression text.

    Carries the byte offset of the failure and the set of token kinds
    that would have been accepted there.
    """

    def __init__(self, message, offset, expected=()):
        super().__init__(f"{message} at offset {offset}" +
                         (f" (expected {', '.join(sorted(expected))})" if expected else ""))
        self.offset = offset
        self.expected = frozenset(expected)


class UnknownIdentifier(IsocapError):
    """An identifier is neither a known function, constant, nor bound parameter."""


class EvalError(IsocapError):
    """Expression evaluation hit a domain violation (log of non-positive, etc.)."""


class NonIntegrableThroat(IsocapError):
    """The areal-to-geodesic gauge change diverges at the inner boundary."""


class BadExponent(IsocapError):
    """The capacity exponent p lies outside the supported open interval (1, 3)."""


class ParabolicMetric(IsocapError):
    """The capacity integral diverges; no decaying capacitary potential exists."""


class ConfigError(IsocapError):
    """Invalid run configuration (CLI or config file)."""
