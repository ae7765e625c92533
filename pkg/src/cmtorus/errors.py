"""Exception hierarchy."""


class CmToriError(Exception):
    """Base class for all errors raised by this package."""


class BoundExceeded(CmToriError):
    pass


class AmbientMismatch(CmToriError):
    pass


class InvalidDescriptor(CmToriError):
    pass


class IndexNotTwo(InvalidDescriptor):
    """The subgroup fixing F+ does not have order 2, so F/F+ is not quadratic."""


class NotDescending(CmToriError):
    pass


class NotCyclic(CmToriError):
    pass


class UnsupportedInertiaShape(CmToriError):
    pass


class PreconditionUnmet(CmToriError):
    pass


class NotUnits(CmToriError):
    pass


class NotQuadratic(CmToriError):
    """The field is not CM, so L/L+ is not a quadratic extension."""


class SearchExhausted(CmToriError):
    def __init__(self, message: str, partial=()):
        super().__init__(message)
        self.partial = list(partial)


class EvenVariables(CmToriError):
    pass
