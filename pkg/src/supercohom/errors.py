"""Exception hierarchy shared across the package."""


class SuperCohomError(Exception):
    """Base class for all package errors."""


class SpecParseError(SuperCohomError):
    """Malformed or inconsistent algebra specification string."""


class BasisError(SuperCohomError):
    """An element cannot be expressed in the requested basis."""


class ResourceCapExceeded(SuperCohomError):
    """A cochain cell is larger than the configured cap."""

    def __init__(self, message, degree=None, grade=None, size=None):
        super().__init__(message)
        self.degree = degree
        self.grade = grade
        self.size = size


class ConsistencyError(SuperCohomError):
    """An internal cross-check failed; results cannot be trusted."""


class SerializationError(SuperCohomError):
    """A cochain or report file could not be parsed or does not match."""
