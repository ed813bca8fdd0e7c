"""Exception hierarchy shared by every module."""


class DTMLabError(Exception):
    """Base class for all library errors."""


class InputError(DTMLabError, ValueError):
    """Malformed argument: bad cell index, wrong region class, invalid descriptor."""


class CapacityError(DTMLabError):
    """An exhaustive enumeration would exceed the configured budget."""

    def __init__(self, message: str, count: int | None = None):
        super().__init__(message)
        self.count = count


class ResolutionError(DTMLabError):
    """No admissible witness exists at the current grid resolution."""


class ExtArithmeticError(DTMLabError, ArithmeticError):
    """Attempt to combine +inf with -inf."""


class ConsistencyError(DTMLabError):
    """Two independent computations of the same quantity disagree."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ClassificationError(DTMLabError):
    """A classification precondition (e.g. subadditivity) does not hold."""

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate
