"""Exception hierarchy shared by all modules."""


class PremodelError(Exception):
    """Base class for every error raised by this package."""


class PrecisionError(PremodelError, ArithmeticError):
    """Double precision cannot certify the requested quantity.

    ``depth`` is set when the failure happens at a known expansion depth.
    """

    def __init__(self, message, depth=None):
        super().__init__(message)
        self.depth = depth


class RationalInputError(PremodelError, ValueError):
    """An irrational number was required but a rational one was detected."""


class NonMonotoneLiftError(PremodelError, ValueError):
    """A circle lift failed the degree-one or monotonicity check."""


class OrderViolation(PremodelError):
    """Circular orders of two orbits disagree; ``index`` is the first offending orbit index."""

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class ConvergenceError(PremodelError, ArithmeticError):
    """An iterative numerical procedure did not converge within its budget."""


class OutsideDomain(PremodelError, ValueError):
    """The point lies outside the domain of the requested map."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class InconclusiveClassification(PremodelError):
    """The dynamics budget was exhausted before the point could be classified."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ConfigError(PremodelError, ValueError):
    """Malformed configuration file."""


class SmallDivisorError(PrecisionError):
    """A denominator ``rho^n - rho`` fell below the double-precision guard.

    ``depth`` holds ``n``.
    """


class EscapeError(PremodelError, ArithmeticError):
    """An orbit expected to stay bounded escaped; ``index`` is the first escaping iterate."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
