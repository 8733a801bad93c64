"""Exception hierarchy shared by every module of the package."""


class TodaError(Exception):
    """Base class for all errors raised by :mod:`looptoda`."""


class SingularMatrix(TodaError, ArithmeticError):
    """A pivot underflowed during LU factorization."""


class IndexOutOfRange(TodaError, IndexError):
    pass


class InvalidParameters(TodaError, ValueError):
    """Model, soliton or dressing data violate a structural invariant."""


class ResonantPair(InvalidParameters):
    """Two solitons make the interaction-coefficient denominator vanish."""


class TooManySolitons(InvalidParameters):
    pass


class ZeroPole(InvalidParameters):
    pass


class DegenerateSelection(InvalidParameters):
    pass


class DegenerateNodes(InvalidParameters):
    """Cauchy-type node sets coincide (within tolerance)."""


class TooManyIndices(InvalidParameters):
    pass


class AtSolutionPole(TodaError, ArithmeticError):
    """The field is evaluated at a zero of its denominator."""


class AtPole(TodaError, ArithmeticError):
    """A spectral parameter sits on a pole of the dressing mapping."""


class AtUnityPole(AtPole):
    pass


class SingularRk(AtSolutionPole):
    pass


class EmptyGrid(TodaError, ValueError):
    pass


class NumericalFailure(TodaError, RuntimeError):
    """A cross-check failed its tolerance."""


class ConfigError(TodaError, ValueError):
    pass
