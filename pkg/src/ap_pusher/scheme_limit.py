"""Implicit midpoint scheme for the guiding-center limit system.

    y' - y = -dt [ (E_perp / b)(yb) + gb grad_perp(1/b)(yb) ]
    g' - g = phi(y) - phi(y')

The energy equation gives ``g'`` in terms of ``y'``, leaving a fixed point
on ``y'`` alone.  No ``eps`` enters anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainEscape, FixedPointDiverged
from .fields import FieldModel, eval_b, eval_E, eval_grad_inv_b, eval_phi
from .geometry import Vec2, perp
from .scheme_ap import steps_for


@dataclass(frozen=True)
class LimitSchemeState:
    y: Vec2
    g: float
    t: float = 0.0


@dataclass
class LimitSchemeTrajectory:
    t: np.ndarray
    y: np.ndarray  # (N+1, 2)
    g: np.ndarray  # (N+1,)
    fp_iterations: np.ndarray  # (N,)
    fp_residual: np.ndarray  # (N,)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def max_fp_residual(self) -> float:
        return float(self.fp_residual.max()) if len(self.fp_residual) else 0.0

    def state(self, n: int) -> LimitSchemeState:
        return LimitSchemeState(Vec2(*self.y[n]), float(self.g[n]), float(self.t[n]))


def _limit_step(s, dt, model, fp_tol, fp_max_iter):
    y, g = Vec2(*s.y), float(s.g)
    phi_n = eval_phi(model, y)
    tol = fp_tol * max(1.0, y.norm())
    yp = y
    d = math.inf
    k = 0
    try:
        for k in range(1, fp_max_iter + 1):
            yb = (yp + y) * 0.5
            gb = g - 0.5 * (eval_phi(model, yp) - phi_n)
            vel = perp(eval_E(model, yb)) / eval_b(model, yb) + perp(eval_grad_inv_b(model, yb)) * gb
            yp_new = y - vel * dt
            d = (yp_new - yp).norm()
            yp = yp_new
            if d <= tol:
                break
            if not math.isfinite(d):
                raise FixedPointDiverged("inner", k, d)
        else:
            raise FixedPointDiverged("inner", fp_max_iter, d)
    except DomainEscape as exc:
        raise FixedPointDiverged("inner", k, d) from exc
    g_new = g - (eval_phi(model, yp) - phi_n)
    return LimitSchemeState(yp, g_new, s.t + dt), k, d / max(1.0, y.norm())


def limit_step(
    s: LimitSchemeState,
    dt: float,
    model: FieldModel,
    fp_tol: float = 1e-12,
    fp_max_iter: int = 200,
) -> LimitSchemeState:
    """Advance the limit scheme by one step of size ``dt``."""
    return _limit_step(s, dt, model, fp_tol, fp_max_iter)[0]


def limit_solve(
    init: LimitSchemeState,
    dt: float,
    T: float,
    model: FieldModel,
    fp_tol: float = 1e-12,
    fp_max_iter: int = 200,
) -> LimitSchemeTrajectory:
    N = steps_for(T, dt)
    if not model.domain_guard(init.y):
        raise DomainEscape(init.y, step=0)
    t = init.t + dt * np.arange(N + 1)
    y = np.empty((N + 1, 2))
    g = np.empty(N + 1)
    iters = np.zeros(N, dtype=np.int64)
    resid = np.zeros(N)
    y[0], g[0] = init.y, init.g
    s = init
    for n in range(N):
        try:
            s, iters[n], resid[n] = _limit_step(s, dt, model, fp_tol, fp_max_iter)
        except (FixedPointDiverged, DomainEscape) as exc:
            exc.step = n
            raise
        y[n + 1], g[n + 1] = s.y, s.g
    return LimitSchemeTrajectory(t, y, g, iters, resid)
