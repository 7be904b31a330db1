"""Exception types raised by the library.

Every domain error derives from :class:`KnasterError`; the CLI maps these to
exit code 1 and prints the class name on stderr.
"""


class KnasterError(Exception):
    """Base class for domain errors."""


class ZeroVertexViolation(KnasterError):
    pass


class NotHomomorphism(KnasterError):
    pass


class NotSurjective(KnasterError):
    pass


class NoFold(KnasterError):
    pass


class InvalidGraph(KnasterError):
    pass


class VertexOutOfRange(KnasterError, IndexError):
    pass


class DomainMismatch(KnasterError):
    pass


class CodomainMismatch(KnasterError):
    pass


class ZeroMultiplicity(KnasterError):
    pass


class MixedSlopes(KnasterError):
    pass


class StarViolation(KnasterError):
    pass


class DegreeMismatch(KnasterError):
    pass


class NonIntegerRatio(KnasterError):
    pass


class BudgetExhausted(KnasterError):
    """Raised when a tower cannot grow further; ``partial`` holds what was built."""

    def __init__(self, message, partial=None, pending=()):
        super().__init__(message)
        self.partial = partial
        self.pending = list(pending)


class NotSeparated(KnasterError):
    pass


class InvalidParams(KnasterError):
    pass


class NoWitness(KnasterError):
    pass


class NoMorphism(KnasterError):
    pass


class InvalidPLMap(KnasterError):
    pass


class OverlapTooLarge(KnasterError):
    pass


class NoContainingLink(KnasterError):
    pass


class CertificateError(KnasterError):
    """A serialized certificate failed to replay."""


class Infeasible(KnasterError):
    pass
