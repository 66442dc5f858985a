"""Exception hierarchy shared by all modules."""


class ReggeError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ReggeError, ValueError):
    """Input parameters outside the supported domain."""


class NoOrbit(ReggeError):
    """No circular orbit exists at the requested energy."""


class Unstable(ReggeError):
    """The circular orbit exists but is not a minimum of the effective potential."""


class DependencyOrder(ReggeError):
    """A recurrence entry was requested before its inputs were available."""


class NoConvergence(ReggeError):
    """An iterative solver exhausted its iteration budget."""


class OrbitLost(ReggeError):
    """A trial renormalization point left the region where an orbit exists."""


class GridTooSmall(ReggeError):
    """The radial box could not be made large enough for the wavefunction to decay."""


class OutOfRange(ReggeError):
    """No state with the requested node count exists at the given energy."""
