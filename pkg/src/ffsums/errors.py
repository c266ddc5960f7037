"""Exception hierarchy shared across the package."""


class FiniteFieldError(Exception):
    """Base class for every error raised by ffsums."""


class NotPrime(FiniteFieldError, ValueError):
    pass


class TooLarge(FiniteFieldError, ValueError):
    pass


class FieldMismatch(FiniteFieldError, ValueError):
    pass


class DivisionByZero(FiniteFieldError, ZeroDivisionError):
    pass


class ZeroCoefficient(FiniteFieldError, ValueError):
    pass


class ZeroRhs(FiniteFieldError, ValueError):
    pass


class CharacteristicTwo(FiniteFieldError, ValueError):
    pass


class BudgetExceeded(FiniteFieldError, RuntimeError):
    pass


class PrincipalCharacter(FiniteFieldError, ValueError):
    pass


class DegreeTooSmall(FiniteFieldError, ValueError):
    pass


class DegreeOutOfRange(FiniteFieldError, ValueError):
    pass


class DegreeNotCoprime(FiniteFieldError, ValueError):
    pass


class NoWitness(FiniteFieldError, LookupError):
    pass


class RangeError(FiniteFieldError, ValueError):
    pass


class BoundViolation(FiniteFieldError, AssertionError):
    """A theorem-backed inequality failed numerically; always a bug signal.

    ``record`` carries the reproducer (a SweepRecord or plain dict).
    """

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record
