"""Exception hierarchy shared by the library and the command line."""


class MonogamyError(Exception):
    """Base class for every error raised by concurrence_monogamy."""


class StateValidationError(MonogamyError, ValueError):
    """A matrix, vector or ensemble violates a state invariant."""


class SubsystemIndexError(MonogamyError, IndexError):
    """Subsystem indices are out of range, duplicated or unordered."""


class DimensionError(MonogamyError, ValueError):
    """The dimension profile does not fit the requested operation."""


class PartitionError(MonogamyError, ValueError):
    """A bipartition is malformed or does not fit the state."""


class WeightError(MonogamyError, ValueError):
    """A weight vector is off the simplex or has the wrong shape."""


class UsageError(MonogamyError):
    """The command line was asked for something inconsistent."""
