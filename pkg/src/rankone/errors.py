"""Exception hierarchy shared by all modules."""


class RankOneError(Exception):
    """Base class for every error raised by the library."""


class Divergent(RankOneError, ArithmeticError):
    """A geometric series that the operation needs does not converge."""


class TailCapExceeded(RankOneError):
    pass


class OutOfDisc(RankOneError, ValueError):
    pass


class Unbounded(RankOneError, ValueError):
    pass


class NotAnIsometry(RankOneError, ValueError):
    pass


class NotLeftInvertibleError(RankOneError):
    pass


class NotUnitVector(RankOneError, ValueError):
    pass


class NotUnimodular(RankOneError, ValueError):
    pass


class PreconditionViolated(RankOneError, ValueError):
    pass


class StandingAssumptionViolated(RankOneError, ValueError):
    """Some diagonal entry or Fourier coefficient of f, g is zero."""


class SingularD(RankOneError):
    pass


class ZeroR(RankOneError):
    pass


class NotIsometricParameters(RankOneError, ValueError):
    pass


class ConsistencyError(RankOneError, AssertionError):
    """Two independent computations of the same quantity disagree."""


class ParseError(RankOneError, ValueError):
    pass


class ValidationError(RankOneError, ValueError):
    pass
