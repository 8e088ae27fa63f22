"""Exception hierarchy shared by all sftpij modules."""


class SFTError(Exception):
    """Base class for every error raised by sftpij."""


class MatrixFormatError(SFTError, ValueError):
    """Matrix input does not follow the interchange schema."""


class ReducibleError(SFTError, ValueError):
    """Operation requires an irreducible adjacency matrix."""


class BudgetExceeded(SFTError):
    """An enumeration would exceed the configured size cap."""


class ExactnessUnavailable(SFTError):
    """Exact rational arithmetic requested for an irrational Perron value."""


class PreconditionError(SFTError, ValueError):
    """Inputs violate an operation's stated precondition."""
