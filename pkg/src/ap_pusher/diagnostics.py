"""Guiding-center transform, velocity reconstruction and error norms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import LengthMismatch, NegativeEnergy, ZeroDirection
from .fields import FieldModel, eval_b, eval_E, eval_phi
from .geometry import Vec2, perp

#: how (x, e) pairs are measured; recorded in run manifests
NORM_CONVENTION = "euclidean norm of the concatenated vector (x1, x2, e); mean over steps 1..N"


@dataclass(frozen=True)
class GuidingCenterState:
    x_gc: Vec2
    e_gc: float
    t: float = 0.0


@dataclass
class ErrorReport:
    per_step_errors: np.ndarray
    eps: float
    dt: float
    comparand: str  # reference-stiff | limit-scheme | limit-reference
    variable_set: str  # x_e | xgc_egc | w
    l1_norm: float = field(init=False)

    def __post_init__(self):
        self.per_step_errors = np.asarray(self.per_step_errors, dtype=float)
        n = len(self.per_step_errors) - 1
        self.l1_norm = float(np.mean(self.per_step_errors[1:])) if n > 0 else 0.0


def gc_transform(x, e: float, w, eps: float, model: FieldModel, t: float = 0.0) -> GuidingCenterState:
    """Guiding-center variables ``x - eps w_perp / b`` and ``e + (eps / b) E_perp . w``."""
    b = eval_b(model, x)
    E = eval_E(model, x)
    x_gc = Vec2(*x) - perp(w) * (eps / b)
    e_gc = e + (eps / b) * perp(E).dot(w)
    return GuidingCenterState(x_gc, e_gc, t)


def gc_transform_series(x: np.ndarray, e: np.ndarray, w: np.ndarray, eps: float, model: FieldModel):
    """Vectorised over a trajectory; returns ``(x_gc, e_gc)`` arrays."""
    xg = np.empty_like(x)
    eg = np.empty_like(e)
    for n in range(len(e)):
        s = gc_transform(Vec2(*x[n]), float(e[n]), Vec2(*w[n]), eps, model)
        xg[n] = s.x_gc
        eg[n] = s.e_gc
    return xg, eg


def reconstruct_velocity(e: float, w) -> Vec2:
    """Velocity ``sqrt(2 e) w / |w|`` with kinetic energy exactly ``e``."""
    if e < 0:
        raise NegativeEnergy(f"cannot reconstruct a velocity from e={e}")
    w = Vec2(*w)
    nw = w.norm()
    if not nw > 1e-300:
        raise ZeroDirection("w has no direction")
    return w * (math.sqrt(2.0 * e) / nw)


def total_energy(x, v, model: FieldModel) -> float:
    return 0.5 * Vec2(*v).norm2() + eval_phi(model, x)


def pointwise_errors(a, b) -> np.ndarray:
    """Euclidean distance between matching entries of two series.

    Entries may be scalars or vectors; each row is flattened, so stacking
    ``(x1, x2, e)`` columns gives the joint (x, e) error.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"series shapes differ: {a.shape} vs {b.shape}")
    d = (a - b).reshape(len(a), -1)
    return np.sqrt(np.sum(d * d, axis=1))


def l1_error(a, b, N: int | None = None) -> float:
    """Mean over ``n = 1..N`` of ``|a_n - b_n|``; index 0 is ignored."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if N is None:
        N = min(len(a), len(b)) - 1
    if N < 1 or len(a) < N + 1 or len(b) < N + 1:
        raise LengthMismatch(f"need {N + 1} entries, got {len(a)} and {len(b)}")
    return float(np.mean(pointwise_errors(a[1 : N + 1], b[1 : N + 1])))


def stack_xe(x: np.ndarray, e: np.ndarray) -> np.ndarray:
    return np.column_stack([x, e])
