"""Exception types shared across the package."""


class OscavgError(Exception):
    """Base class for all package-specific errors."""


class NotSkewHermitian(OscavgError):
    pass


class SingularEigenbasis(OscavgError):
    pass


class DimensionMismatch(OscavgError):
    pass


class WrongPlanMode(OscavgError):
    pass


class BudgetExceeded(OscavgError):
    """Sample budget ran out before the requested accuracy was met.

    Carries the last plan and the accuracy that was actually achieved so
    callers can decide whether the partial result is usable.
    """

    def __init__(self, message, plan=None, achieved_error=None, value=None):
        super().__init__(message)
        self.plan = plan
        self.achieved_error = achieved_error
        self.value = value


class NonFiniteState(OscavgError):
    """A time stepper produced a non-finite state.

    The trajectory computed up to (and excluding) the bad step is attached.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class PlateContact(OscavgError):
    pass


class RadiusZero(OscavgError):
    pass


class NoRealSolution(OscavgError):
    pass


class NoConvergence(OscavgError):
    pass


class SingularJacobian(OscavgError):
    pass


class NonPositiveParameter(OscavgError):
    pass


class GridMismatch(OscavgError):
    pass


class DomainError(OscavgError):
    pass


class WindowTooShort(OscavgError):
    pass


class NoSharedTimes(OscavgError):
    pass


class ConfigError(OscavgError):
    pass


class WrongDimension(OscavgError):
    pass
