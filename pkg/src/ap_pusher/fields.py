"""Static field models: magnetic amplitude ``b`` and electric potential ``phi``.

Each model supplies closed-form derivatives (``E = -grad phi`` and
``grad(1/b)``); the implicit schemes evaluate them inside their fixed-point
loops, so nothing here is differentiated numerically.
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np

from .errors import ConfigError, DomainEscape
from .geometry import ZERO, Vec2, perp


class FieldModel:
    """Base class for a time-independent field model.

    Subclasses implement :meth:`b`, :meth:`phi`, :meth:`E`,
    :meth:`grad_inv_b` and :meth:`domain_guard`; they may assume the position
    is inside the domain.  Use the module level ``eval_*`` helpers to get the
    guarded versions.
    """

    name = "custom"
    #: asserted lower bound of ``b`` on the guarded domain
    b_floor: float = 1.0
    #: ``(xmin, xmax, ymin, ymax)`` sampled for the b ceiling, or None when b is constant
    bounding_box: tuple[float, float, float, float] | None = None

    def b(self, x) -> float:
        raise NotImplementedError

    def phi(self, x) -> float:
        raise NotImplementedError

    def E(self, x) -> Vec2:
        raise NotImplementedError

    def grad_inv_b(self, x) -> Vec2:
        raise NotImplementedError

    def domain_guard(self, x) -> bool:
        return math.isfinite(x[0]) and math.isfinite(x[1])

    @cached_property
    def b_ceiling_estimate(self) -> float:
        """Max of ``b`` over a 64x64 grid of the guarded bounding box."""
        if self.bounding_box is None:
            return self.b(ZERO)
        xmin, xmax, ymin, ymax = self.bounding_box
        best = 0.0
        for x1 in np.linspace(xmin, xmax, 64):
            for x2 in np.linspace(ymin, ymax, 64):
                x = Vec2(float(x1), float(x2))
                if self.domain_guard(x):
                    best = max(best, self.b(x))
        return best

    def describe(self) -> dict:
        return {"name": self.name}


class DiskField(FieldModel):
    """``b(x) = 10 / sqrt(100 - |x|^2)`` and ``phi(x) = |x|^2 / 2``.

    ``b`` blows up on the circle ``|x| = 10``; positions with
    ``|x|^2 >= 100 (1 - margin)`` are rejected.
    """

    name = "disk"
    b_floor = 1.0
    bounding_box = (-10.0, 10.0, -10.0, 10.0)

    def __init__(self, margin: float = 1e-6):
        self.margin = margin
        self._r2_max = 100.0 * (1.0 - margin)

    def b(self, x) -> float:
        return 10.0 / math.sqrt(100.0 - (x[0] * x[0] + x[1] * x[1]))

    def phi(self, x) -> float:
        return 0.5 * (x[0] * x[0] + x[1] * x[1])

    def E(self, x) -> Vec2:
        return Vec2(-x[0], -x[1])

    def grad_inv_b(self, x) -> Vec2:
        s = 10.0 * math.sqrt(100.0 - (x[0] * x[0] + x[1] * x[1]))
        return Vec2(-x[0] / s, -x[1] / s)

    def domain_guard(self, x) -> bool:
        r2 = x[0] * x[0] + x[1] * x[1]
        # NaN compares False, so non-finite positions are rejected too
        return r2 < self._r2_max

    def describe(self) -> dict:
        return {"name": self.name, "margin": self.margin}


class UniformField(FieldModel):
    """Constant ``b = b0`` with ``phi = 0`` or ``phi = |x|^2 / 2``."""

    name = "uniform"

    def __init__(self, b0: float = 1.0, phi: str = "zero"):
        if not b0 > 0:
            raise ValueError("b0 must be positive")
        if phi not in ("zero", "quadratic"):
            raise ValueError(f"unknown potential {phi!r}")
        self.b0 = float(b0)
        self.b_floor = self.b0
        self.potential = phi

    def b(self, x) -> float:
        return self.b0

    def phi(self, x) -> float:
        if self.potential == "zero":
            return 0.0
        return 0.5 * (x[0] * x[0] + x[1] * x[1])

    def E(self, x) -> Vec2:
        if self.potential == "zero":
            return ZERO
        return Vec2(-x[0], -x[1])

    def grad_inv_b(self, x) -> Vec2:
        return ZERO

    def describe(self) -> dict:
        return {"name": self.name, "b0": self.b0, "phi": self.potential}


def _check(model: FieldModel, x) -> None:
    if not model.domain_guard(x):
        raise DomainEscape(x)


def eval_b(model: FieldModel, x) -> float:
    _check(model, x)
    b = model.b(x)
    assert b >= model.b_floor * (1.0 - 1e-12), f"b={b} below floor {model.b_floor}"
    return b


def eval_phi(model: FieldModel, x) -> float:
    _check(model, x)
    return model.phi(x)


def eval_E(model: FieldModel, x) -> Vec2:
    _check(model, x)
    return model.E(x)


def eval_grad_inv_b(model: FieldModel, x) -> Vec2:
    _check(model, x)
    return model.grad_inv_b(x)


def eval_F(model: FieldModel, x) -> Vec2:
    """Return ``-J E / b``, the E x B drift velocity ``-E_perp / b``."""
    _check(model, x)
    Ep = perp(model.E(x))
    b = model.b(x)
    return Vec2(-Ep[0] / b, -Ep[1] / b)


def make_field(selector) -> FieldModel:
    """Build a model from a config selector.

    Accepts ``"disk"``, ``"uniform"`` or a mapping such as
    ``{"name": "uniform", "b0": 2.0, "phi": "quadratic"}``.
    """
    if isinstance(selector, FieldModel):
        return selector
    if isinstance(selector, str):
        selector = {"name": selector}
    if not isinstance(selector, dict):
        raise ConfigError(f"bad field selector {selector!r}")
    opts = dict(selector)
    name = opts.pop("name", None)
    try:
        if name == "disk":
            return DiskField(**opts)
        if name == "uniform":
            return UniformField(**opts)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad field options {selector!r}: {exc}") from exc
    raise ConfigError(f"unknown field {name!r}")
