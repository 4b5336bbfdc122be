"""Exception types shared across the library."""


class ValidationError(ValueError):
    """Raised when inputs violate a documented precondition."""


class NumericError(RuntimeError):
    """Raised when an iterative routine fails to meet its numerical contract."""
