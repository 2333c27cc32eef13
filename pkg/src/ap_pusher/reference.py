"""Resolved explicit integrators used as ground truth.

Both solvers use the classical fourth-order Runge-Kutta method at a fixed
internal step that divides the output sampling interval, so samples land
exactly on ``t_n = n T / n_samples`` without interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainEscape, EnergyDriftExceeded, StepBudgetExceeded
from .fields import FieldModel
from .geometry import Vec2


@dataclass(frozen=True)
class PhaseState:
    x: Vec2
    v: Vec2
    t: float = 0.0


@dataclass(frozen=True)
class LimitState:
    y: Vec2
    g: float
    t: float = 0.0


@dataclass(frozen=True)
class RefSolverConfig:
    points_per_gyroperiod: int = 40
    max_steps: int = 10**8
    energy_drift_tol: float = 1e-8
    #: internal steps of the limit solver over [0, T]
    limit_steps: int = 2**14

    def __post_init__(self):
        if self.points_per_gyroperiod < 8:
            raise ValueError("points_per_gyroperiod must be >= 8")


@dataclass
class PhaseTrajectory:
    """Samples of an exact-flow approximation; arrays indexed by sample."""

    t: np.ndarray
    x: np.ndarray  # (n+1, 2)
    v: np.ndarray  # (n+1, 2)
    eps: float
    internal_steps: int
    energy_drift: float

    def __len__(self) -> int:
        return len(self.t)

    def state(self, n: int) -> PhaseState:
        return PhaseState(Vec2(*self.x[n]), Vec2(*self.v[n]), float(self.t[n]))

    def kinetic_energy(self) -> np.ndarray:
        return 0.5 * np.sum(self.v**2, axis=1)


@dataclass
class LimitTrajectory:
    t: np.ndarray
    y: np.ndarray  # (n+1, 2)
    g: np.ndarray  # (n+1,)
    internal_steps: int = 0

    def __len__(self) -> int:
        return len(self.t)

    def state(self, n: int) -> LimitState:
        return LimitState(Vec2(*self.y[n]), float(self.g[n]), float(self.t[n]))


def stiff_step_size(eps: float, model: FieldModel, cfg: RefSolverConfig) -> float:
    """Internal step ``2 pi eps^2 / (points_per_gyroperiod * b_ceiling)``."""
    return 2.0 * math.pi * eps * eps / (cfg.points_per_gyroperiod * model.b_ceiling_estimate)


def _energy(model: FieldModel, x1, x2, v1, v2) -> float:
    return 0.5 * (v1 * v1 + v2 * v2) + model.phi(Vec2(x1, x2))


def reference_solve_stiff(
    init: PhaseState,
    eps: float,
    T: float,
    model: FieldModel,
    cfg: RefSolverConfig = RefSolverConfig(),
    n_samples: int = 1,
) -> PhaseTrajectory:
    """Integrate ``eps x' = v``, ``eps v' = E(x) - b(x) v_perp / eps`` on [0, T].

    Returns ``n_samples + 1`` samples at ``t_n = n T / n_samples``.

    Raises:
        DomainEscape: the particle leaves the model's domain.
        StepBudgetExceeded: more than ``cfg.max_steps`` steps would be needed.
        EnergyDriftExceeded: relative energy drift above ``cfg.energy_drift_tol``.
    """
    if not (eps > 0 and T > 0 and n_samples >= 1):
        raise ValueError("need eps > 0, T > 0 and n_samples >= 1")
    if not model.domain_guard(init.x):
        raise DomainEscape(init.x)

    dt_sample = T / n_samples
    per_sample = max(1, math.ceil(dt_sample / stiff_step_size(eps, model, cfg)))
    total = per_sample * n_samples
    if total > cfg.max_steps:
        raise StepBudgetExceeded(total, cfg.max_steps)
    h = dt_sample / per_sample

    ie = 1.0 / eps
    ie2 = ie * ie
    b_of, E_of, guard = model.b, model.E, model.domain_guard

    def rhs(x1, x2, v1, v2):
        p = Vec2(x1, x2)
        b = b_of(p)
        E = E_of(p)
        return (
            v1 * ie,
            v2 * ie,
            E[0] * ie + b * v2 * ie2,
            E[1] * ie - b * v1 * ie2,
        )

    t = np.linspace(0.0, T, n_samples + 1)
    xs = np.empty((n_samples + 1, 2))
    vs = np.empty((n_samples + 1, 2))
    x1, x2 = float(init.x[0]), float(init.x[1])
    v1, v2 = float(init.v[0]), float(init.v[1])
    xs[0] = x1, x2
    vs[0] = v1, v2
    h2 = 0.5 * h
    h6 = h / 6.0
    try:
        for n in range(1, n_samples + 1):
            for _ in range(per_sample):
                a1, a2, a3, a4 = rhs(x1, x2, v1, v2)
                b1, b2, b3, b4 = rhs(x1 + h2 * a1, x2 + h2 * a2, v1 + h2 * a3, v2 + h2 * a4)
                c1, c2, c3, c4 = rhs(x1 + h2 * b1, x2 + h2 * b2, v1 + h2 * b3, v2 + h2 * b4)
                d1, d2, d3, d4 = rhs(x1 + h * c1, x2 + h * c2, v1 + h * c3, v2 + h * c4)
                x1 += h6 * (a1 + 2.0 * (b1 + c1) + d1)
                x2 += h6 * (a2 + 2.0 * (b2 + c2) + d2)
                v1 += h6 * (a3 + 2.0 * (b3 + c3) + d3)
                v2 += h6 * (a4 + 2.0 * (b4 + c4) + d4)
                if not guard((x1, x2)):
                    raise DomainEscape((x1, x2))
            xs[n] = x1, x2
            vs[n] = v1, v2
    except (ValueError, ZeroDivisionError) as exc:
        # a stage evaluation fell outside the domain (e.g. sqrt of a negative)
        raise DomainEscape((x1, x2), f"stage evaluation failed near {(x1, x2)}: {exc}") from exc

    h0 = _energy(model, *xs[0], *vs[0])
    energies = np.array([_energy(model, *xs[n], *vs[n]) for n in range(n_samples + 1)])
    drift = float(np.max(np.abs(energies - h0)) / (1.0 + abs(h0)))
    if drift > cfg.energy_drift_tol:
        raise EnergyDriftExceeded(drift, cfg.energy_drift_tol)
    return PhaseTrajectory(t, xs, vs, eps, total, drift)


def reference_solve_limit(
    init: LimitState,
    T: float,
    model: FieldModel,
    cfg: RefSolverConfig = RefSolverConfig(),
    n_samples: int = 1,
) -> LimitTrajectory:
    """Integrate the guiding-center limit system on [0, T].

    ``y' = -(E_perp / b)(y) - g grad_perp(1/b)(y)``, with ``g`` slaved to the
    invariant ``g + phi(y) = g0 + phi(y0)`` rather than integrated.
    """
    if not (T > 0 and n_samples >= 1):
        raise ValueError("need T > 0 and n_samples >= 1")
    if not model.domain_guard(init.y):
        raise DomainEscape(init.y)

    per_sample = max(1, math.ceil(cfg.limit_steps / n_samples))
    total = per_sample * n_samples
    if total > cfg.max_steps:
        raise StepBudgetExceeded(total, cfg.max_steps)
    h = T / total

    y1, y2 = float(init.y[0]), float(init.y[1])
    invariant = float(init.g) + model.phi(Vec2(y1, y2))
    b_of, E_of, gib_of, phi_of, guard = (
        model.b, model.E, model.grad_inv_b, model.phi, model.domain_guard,
    )

    def rhs(y1, y2):
        p = Vec2(y1, y2)
        b = b_of(p)
        E = E_of(p)
        gib = gib_of(p)
        g = invariant - phi_of(p)
        # -(E_perp)/b - g (grad 1/b)_perp with z_perp = (-z2, z1)
        return E[1] / b + g * gib[1], -E[0] / b - g * gib[0]

    t = np.linspace(0.0, T, n_samples + 1)
    ys = np.empty((n_samples + 1, 2))
    gs = np.empty(n_samples + 1)
    ys[0] = y1, y2
    gs[0] = invariant - phi_of(Vec2(y1, y2))
    h2 = 0.5 * h
    h6 = h / 6.0
    try:
        for n in range(1, n_samples + 1):
            for _ in range(per_sample):
                a1, a2 = rhs(y1, y2)
                b1, b2 = rhs(y1 + h2 * a1, y2 + h2 * a2)
                c1, c2 = rhs(y1 + h2 * b1, y2 + h2 * b2)
                d1, d2 = rhs(y1 + h * c1, y2 + h * c2)
                y1 += h6 * (a1 + 2.0 * (b1 + c1) + d1)
                y2 += h6 * (a2 + 2.0 * (b2 + c2) + d2)
                if not guard((y1, y2)):
                    raise DomainEscape((y1, y2))
            ys[n] = y1, y2
            gs[n] = invariant - phi_of(Vec2(y1, y2))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainEscape((y1, y2), f"stage evaluation failed near {(y1, y2)}: {exc}") from exc
    return LimitTrajectory(t, ys, gs, total)
