"""Exception types shared across the package."""


class BlochCPError(Exception):
    """Base class for all errors raised by blochcp."""


class InputError(BlochCPError, ValueError):
    """An argument has the wrong shape, range or value."""


class ContractError(BlochCPError, ValueError):
    """An operation was asked to do something outside its contract,
    e.g. the Bloch matrix of a channel that is not unital."""


class ResourceError(BlochCPError):
    """The requested problem size exceeds the configured cap."""


class NotCompletelyPositiveError(BlochCPError, ValueError):
    """A step that needs a completely positive map was given one that is not."""
