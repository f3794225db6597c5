"""Exception types raised by the solvers and post-processing steps."""


class QdiodeError(Exception):
    """Base class for all package-specific failures."""


class SingularLevel(QdiodeError):
    """A level matrix in the excitation hierarchy is numerically singular.

    Carries the level index so callers can report which block failed
    instead of silently regularizing it.
    """

    def __init__(self, level: int, cond: float):
        self.level = level
        self.cond = cond
        super().__init__(
            f"level {level} matrix is singular or ill-conditioned "
            f"(condition estimate {cond:.3e})"
        )


class StepFailure(QdiodeError):
    """The time-domain integrator failed to advance."""

    def __init__(self, time: float, detail: str = ""):
        self.time = time
        detail = f": {detail}" if detail else ""
        super().__init__(f"time stepping failed near t = {time:.6g}{detail}")


class ZeroFlux(QdiodeError):
    """Transmittivity requested for an input pulse carrying zero flux."""


class ConfigError(QdiodeError):
    """A sweep configuration or CLI invocation failed validation."""


class BothBlocked(QdiodeError):
    """Contrast metrics are undefined because both directions transmit zero."""
