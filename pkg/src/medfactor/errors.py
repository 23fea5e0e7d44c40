"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation at or beyond a pole of a meromorphic product."""


class UsageError(ValueError):
    """Inputs that are individually valid but cannot be combined."""


class SchemaError(ValueError):
    """A persisted artifact does not match the expected schema version."""
