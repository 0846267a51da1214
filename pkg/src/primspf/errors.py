"""Exception types shared across modules."""


class CapExceededError(RuntimeError):
    """A configured size cap (layer, alphabet, subset space) was exceeded."""


class NotPrimitiveError(ValueError):
    """An operation that needs a primitive set received a non-primitive one."""


class NotSynchronizingError(ValueError):
    """An operation that needs a synchronizing automaton received one that is not."""
