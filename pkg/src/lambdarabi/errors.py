"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain where an operation is defined."""


class ValidationError(ValueError):
    """Invalid physical parameters or scenario field.

    ``path`` names the offending field (dotted, e.g. ``params.omega21``).
    """

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


class IntegratorError(RuntimeError):
    """Fixed-step integration produced an untrustworthy trajectory."""

    def __init__(self, message, **report):
        super().__init__(message)
        self.report = report


class SingularityError(IntegratorError):
    """Ratio variables blew up (b1 passed close to zero)."""
