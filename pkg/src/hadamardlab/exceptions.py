"""Exception types shared across the package."""


class HadamardLabError(Exception):
    """Base class for all package errors."""


class SpaceMismatchError(HadamardLabError):
    """Two points (or a point and a space) belong to different spaces."""


class MembershipError(HadamardLabError):
    """Coordinates do not describe a point of the space."""


class DomainError(HadamardLabError):
    """An argument lies outside the documented domain of an operation."""


class ConstructionError(HadamardLabError):
    """A space or isometry failed its construction-time self-test."""


class ConvergenceError(HadamardLabError):
    """An iterative solver exhausted its budget without meeting its stopping rule."""


class PreconditionError(HadamardLabError):
    """Input data fails a check's entry hypothesis, so no defect is reported."""


class EvanescenceDiagnostic(HadamardLabError):
    """An orbit escaped to infinity where a bounded one was required.

    Raised by solvers whose correctness depends on a bounded orbit; carries
    the observed escape data so callers can report the unbounded alternative
    instead of a plain failure.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness
