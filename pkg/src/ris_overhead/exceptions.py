"""Exception hierarchy shared by all solver modules."""


class RisAllocError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(RisAllocError, ValueError):
    """Input array or parameter is malformed (non-finite, wrong shape, ...)."""


class DegenerateMatrixError(RisAllocError, ValueError):
    """A matrix that must be nonzero is (numerically) zero."""


class BracketError(RisAllocError, ValueError):
    """Root finder was given an interval without a sign change."""


class InfeasibleError(RisAllocError):
    """The resource-allocation constraint set is empty or was violated."""


class OverheadExceedsSlotError(InfeasibleError):
    """Channel estimation alone takes at least the whole time slot."""


class InstanceTooLargeError(RisAllocError, ValueError):
    """Exhaustive search requested on an instance beyond the enumeration cap."""
