"""Exception types shared across the package."""


class BicopterError(Exception):
    """Base class for all package errors."""


class SafeSetViolationError(BicopterError):
    """A state left the closed safe set (|chi| >= 1 before clamping)."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ReferenceInfeasibleError(BicopterError):
    """A desired position lies on or outside the position bounds."""


class ControllerSingularityError(BicopterError):
    """|det Psi| fell below the inversion floor despite force projection."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class IntegrationBlowupError(BicopterError):
    """An integration step produced a non-finite state."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class PlanGeometryError(BicopterError):
    """Degenerate waypoint-plan geometry (zero-length segment, chamfer >= half-extent)."""


class ConfigError(BicopterError):
    """Scenario configuration failed validation; message names the offending field."""


class LogSchemaError(BicopterError):
    """A log file does not match the documented CSV column contract."""


class SimulationError(BicopterError):
    """A scenario run aborted; carries the log rows accumulated before failure."""

    def __init__(self, message, partial_log=None, step=None):
        super().__init__(message)
        self.partial_log = partial_log
        self.step = step
