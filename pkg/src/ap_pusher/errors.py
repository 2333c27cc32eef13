"""Exception hierarchy shared by the integrators, diagnostics and harness."""

from __future__ import annotations


class PusherError(Exception):
    """Base class for every error raised by this package."""


class DomainEscape(PusherError):
    """A position left the region where the field model is defined."""

    def __init__(self, x, message: str | None = None, step: int | None = None):
        self.x = tuple(x)
        self.step = step
        super().__init__(message or f"position {self.x} is outside the field domain")


class FixedPointDiverged(PusherError):
    """An implicit step did not converge within its iteration budget.

    ``stage`` is ``"inner"`` (position sub-iteration) or ``"outer"``
    (half-step velocity iteration).  ``step`` is filled in by the trajectory
    drivers so the failing step can be located.
    """

    def __init__(self, stage: str, iterations: int, residual: float, step: int | None = None):
        self.stage = stage
        self.iterations = iterations
        self.residual = residual
        self.step = step
        super().__init__(str(self))

    def __str__(self) -> str:
        where = "" if self.step is None else f" at step {self.step}"
        return (
            f"{self.stage} fixed point diverged{where}: residual {self.residual:.3e} "
            f"after {self.iterations} iterations"
        )


class StepBudgetExceeded(PusherError):
    """The reference integrator would need more steps than allowed."""

    def __init__(self, needed: int, budget: int):
        self.needed = needed
        self.budget = budget
        super().__init__(f"reference run needs {needed} steps, budget is {budget}")


class EnergyDriftExceeded(PusherError):
    """Relative energy drift of a reference run is above tolerance."""

    def __init__(self, drift: float, tol: float):
        self.drift = drift
        self.tol = tol
        super().__init__(f"relative energy drift {drift:.3e} exceeds {tol:.1e}")


class NegativeEnergy(PusherError):
    pass


class ZeroDirection(PusherError):
    pass


class LengthMismatch(PusherError):
    pass


class DegenerateFit(PusherError):
    pass


class ConfigError(PusherError):
    pass
