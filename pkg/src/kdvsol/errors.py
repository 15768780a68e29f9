"""Exception types shared across the package."""


class KdvsolError(Exception):
    """Base class for all errors raised by this package."""


class SingularSystem(KdvsolError):
    """Coupling linear system is rank deficient beyond what the fallback can recover."""


class NotHerglotz(KdvsolError):
    """Solved polynomial pair violates the positivity/growth condition.

    Signals inadmissible coupling data that slipped past the sign checks.
    """


class Unsolvable(KdvsolError):
    """The coupling data admits no solution."""


class PoleAt(KdvsolError):
    """Evaluation point sits on a non-removable pole."""

    def __init__(self, location):
        super().__init__(f"evaluation point hits a pole at {location}")
        self.location = location


class NegativeSquare(KdvsolError):
    """A squared norming constant came out non-positive (invalid spectral data)."""


class InvalidN(KdvsolError):
    """Operation requires at least one bound state."""


class IntegratorFailure(KdvsolError):
    """ODE integration failed to reach the matching point."""


class NearPole(KdvsolError):
    """Wronskian too close to zero to define a transmission value."""


class MissedEigenvalue(KdvsolError):
    """Eigenvalue search recovered a different number of zeros than expected."""


class WindowTooSmall(KdvsolError):
    """Grid window does not cover the soliton trajectories plus decay margins."""
