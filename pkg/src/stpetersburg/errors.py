"""Exception types shared by the package."""


class PreconditionError(ValueError):
    """An input violates the documented precondition of an operation."""


class InsufficientDigits(PreconditionError):
    """A finite digit prefix ends before the requested quantity is determined."""


class ScheduleInfeasible(PreconditionError):
    """A construction level cannot fit its word and filler into the gap."""


class RegimeMismatch(PreconditionError):
    """The requested growth regime has no point to construct."""
