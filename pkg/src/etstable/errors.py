"""Exception hierarchy shared by all modules."""


class EtsError(Exception):
    """Base class for every error raised by etstable."""


class InvalidInput(EtsError, ValueError):
    """Malformed or out-of-domain input data."""


class DivergentIntegral(EtsError, ArithmeticError):
    pass


class QuadratureFailure(EtsError, ArithmeticError):
    pass


class StableExponentOutOfRange(InvalidInput):
    pass


class InfiniteRadiusAtom(InvalidInput):
    pass


class StablePartForbidden(InvalidInput):
    pass


class ParameterMismatch(InvalidInput):
    pass


class DimensionMismatch(InvalidInput):
    pass


class NotPSD(InvalidInput):
    pass
