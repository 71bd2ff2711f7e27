"""Exception hierarchy.

Two families matter to callers: :class:`DomainError` for inputs outside the
region where a quantity is defined, and :class:`NumericalError` for
algorithms that did not reach their tolerance. The CLI maps them to exit
codes 3 and 4.
"""


class CrossfieldError(Exception):
    """Base class for all package errors."""


class DomainError(CrossfieldError, ValueError):
    pass


class NumericalError(CrossfieldError, ArithmeticError):
    pass


class ZeroField(DomainError):
    """Magnetic field is zero, so the cyclotron frequency vanishes."""


class NotDecaying(DomainError):
    """A pole with non-negative imaginary part has no finite decay time."""


class InvalidCoupling(DomainError):
    pass


class NoBoundState(DomainError):
    pass


class BranchDomain(DomainError):
    """Energy lies outside the sector where the logarithm branch is fixed."""


class PoleProximity(DomainError):
    """Integration variable too close to a zero of ``sin s``."""


class EmptyWindow(DomainError):
    pass


class OnPole(DomainError):
    pass


class CoincidentPoints(DomainError):
    pass


class NoConvergence(NumericalError):
    pass


class IllConditioned(NumericalError):
    """Cancellation along the contour exceeds the requested accuracy."""


class LeftDomain(NumericalError):
    """Iterate wandered out of the admissible energy region."""


class BranchLost(NumericalError):
    """Continuation step underflowed; ``partial`` holds what was traced."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ExtrapolationUnstable(NumericalError):
    pass
