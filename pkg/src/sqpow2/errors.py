"""Exception types shared by the package."""


class Sqpow2Error(Exception):
    """Base class."""


class DomainError(Sqpow2Error, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ResourceError(Sqpow2Error, RuntimeError):
    """A configured size/time cap would be exceeded."""
