"""Exception hierarchy shared by every module."""


class EllfaceError(Exception):
    """Base class for all library errors."""


class ConfigError(EllfaceError):
    """Invalid parameters or run configuration."""


class NonConvergent(EllfaceError):
    """A product or series cannot converge for the given arguments."""


class TruncationExceeded(EllfaceError):
    """Tolerance not reached before the configured term cap."""


class DomainError(EllfaceError):
    """Argument outside the domain of a function (e.g. z = 0 in a theta)."""


class PoleError(EllfaceError):
    """A denominator vanishes within tolerance."""


class ChargeMismatch(EllfaceError):
    """Bra/ket momenta violate the zero-mode selection rule."""


class WindowTooSmall(EllfaceError):
    """A formal Laurent window is too short for the requested check."""


class QuadratureNotConverged(EllfaceError):
    """Contour quadrature disagrees with itself under node doubling."""


class IntegralNotConverged(EllfaceError):
    """Real-line quadrature failed to reach tolerance."""


class SingularIntertwiner(EllfaceError):
    """Intertwiner matrix is numerically singular."""
