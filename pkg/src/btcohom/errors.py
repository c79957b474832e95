"""Exception types shared across the package."""


class BuildingError(Exception):
    """Base class for all package errors."""


class InsufficientPrecision(BuildingError):
    """A truncated computation ran out of significant coefficients."""


class NotAVertex(BuildingError):
    """An apartment point with non-integral pairings was used as a vertex."""


class WindowTooSmall(BuildingError):
    """The requested support or truncation does not fit in the window."""


class BoundaryError(BuildingError):
    """A cochain support touches orbits that are not fully visible in the window."""


class CertificationFailure(BuildingError):
    """A certificate (group element, collapse, cusp match) could not be produced."""


class InstabilityError(BuildingError):
    """Counts or dimensions changed between the two largest radii."""


class ConfigError(BuildingError):
    """Invalid run configuration."""
