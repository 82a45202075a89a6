"""Exception hierarchy.

Numeric failures (precision, singular orbits, tied lengths, budgets) derive
from ``NumericError``; bad inputs derive from ``ConfigError``. The CLI maps
the two families to distinct exit codes.
"""


class IETLabError(Exception):
    """Base class for all library errors."""


class ConfigError(IETLabError, ValueError):
    pass


class NumericError(IETLabError, ArithmeticError):
    pass


# -- construction / input ---------------------------------------------------

class NonPositiveLength(ConfigError):
    pass


class DimensionMismatch(ConfigError):
    pass


class ReduciblePermutation(ConfigError):
    pass


class OutOfDomain(ConfigError):
    pass


class PathMismatch(ConfigError):
    pass


class StructureViolation(ConfigError):
    pass


class ColumnGuardError(ConfigError):
    """A column of a matrix has a zero entry where a ratio is needed."""


class NotRotationClass(ConfigError):
    pass


class DomainError(ConfigError):
    """Parameters outside the range where a formula is defined."""


# -- numeric ----------------------------------------------------------------

class PrecisionExhausted(NumericError):
    pass


class SingularOrbit(NumericError):
    def __init__(self, step, point=None):
        self.step = step
        self.point = point
        super().__init__(f"orbit hits a discontinuity at step {step}")


class TieLengths(NumericError):
    pass


class StepBudgetExceeded(NumericError):
    pass


class ReturnBudgetExceeded(NumericError):
    pass


class NonContractingPath(NumericError):
    pass


class DegenerateFrame(NumericError):
    pass


class BudgetExceeded(NumericError):
    def __init__(self, msg, best=None):
        self.best = best
        super().__init__(msg)


class QuadratureBlowup(NumericError):
    pass


class NoGapFound(NumericError):
    def __init__(self, msg, measure=None):
        self.measure = measure
        super().__init__(msg)


class TooSmallN(NumericError):
    pass


class CertificateFailure(NumericError):
    pass
