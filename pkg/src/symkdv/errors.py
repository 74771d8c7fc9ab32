"""Exception hierarchy.

Every error carries a message naming the violated precondition and the
offending value; the CLI prints it verbatim.
"""


class SymKdVError(ValueError):
    """Base class for all domain and validation errors raised by the package."""


class InvalidResolutionError(SymKdVError):
    pass


class InvalidOrderError(SymKdVError):
    pass


class DomainError(SymKdVError):
    """A value falls outside the domain where an operation is defined."""


class GridMismatchError(SymKdVError):
    pass


class InvalidGeneratorError(SymKdVError):
    pass


class DegenerateElementError(SymKdVError):
    pass


class DimensionError(SymKdVError):
    pass
