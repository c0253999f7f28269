"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """An exact search exceeded its node budget."""


class PreconditionError(ValueError):
    """An operation was called on input outside its contract."""


class InvariantError(ValueError):
    """A constructed object violates one of its structural invariants."""
