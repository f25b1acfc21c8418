"""Exception types shared by the sumfree bound modules and the CLI."""


class SumfreeError(Exception):
    """Base class for every error raised on purpose by this project."""


class InvalidParameterError(SumfreeError, ValueError):
    """A parameter lies outside the domain of the requested operation."""


class AmbientMismatchError(InvalidParameterError):
    """A lattice point does not live in the box {1..n}^k it is tested against."""


class InstanceTooLargeError(SumfreeError):
    """A materialization, search or work cap would be exceeded."""


class RootBracketError(SumfreeError):
    """No sign change was found for a root-finding problem."""


class UnsupportedBoundError(SumfreeError):
    """No upper-bound method exists for the requested fold parameter."""
