"""Asymptotic-preserving particle pusher for strongly magnetized 2D dynamics."""

from .errors import (
    ConfigError,
    DegenerateFit,
    DomainEscape,
    EnergyDriftExceeded,
    FixedPointDiverged,
    LengthMismatch,
    NegativeEnergy,
    PusherError,
    StepBudgetExceeded,
    ZeroDirection,
)
from .fields import FieldModel, DiskField, UniformField, make_field
from .geometry import Vec2, cayley_rotate, cayley_solve, perp
from .reference import (
    LimitState,
    PhaseState,
    RefSolverConfig,
    reference_solve_limit,
    reference_solve_stiff,
)
from .scheme_ap import AugmentedState, SchemeParams, ap_limit_probe, ap_solve, ap_step
from .scheme_limit import LimitSchemeState, limit_solve, limit_step

__version__ = "0.1.0"
