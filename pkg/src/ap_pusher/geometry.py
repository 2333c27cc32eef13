"""2D rotation algebra in the transverse plane.

``J`` is the rotation by +pi/2, ``J z = (-z2, z1)``.  The Cayley-type maps
below are the closed forms of ``(I + a J)^-1`` and ``(I + a J)^-1 (I - a J)``
that the implicit pusher applies to the half-step velocity.
"""

from __future__ import annotations

import math
from typing import NamedTuple


class Vec2(NamedTuple):
    """Point or vector of the transverse plane.

    Arithmetic operators are vector operations (not tuple concatenation or
    repetition).
    """

    x1: float
    x2: float

    def __add__(self, other):
        return Vec2(self[0] + other[0], self[1] + other[1])

    def __sub__(self, other):
        return Vec2(self[0] - other[0], self[1] - other[1])

    def __mul__(self, s):
        return Vec2(self[0] * s, self[1] * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return Vec2(self[0] / s, self[1] / s)

    def __neg__(self):
        return Vec2(-self[0], -self[1])

    def dot(self, other) -> float:
        return self[0] * other[0] + self[1] * other[1]

    def norm(self) -> float:
        return math.hypot(self[0], self[1])

    def norm2(self) -> float:
        return self[0] * self[0] + self[1] * self[1]

    def is_finite(self) -> bool:
        return math.isfinite(self[0]) and math.isfinite(self[1])


ZERO = Vec2(0.0, 0.0)


def perp(z) -> Vec2:
    """Return ``J z = (-z2, z1)``."""
    return Vec2(-z[1], z[0])


def cayley_solve(alpha: float, z) -> Vec2:
    """Return ``(I + alpha J)^-1 z``.

    Uses ``(I + aJ)^-1 = (I - aJ) / (1 + a^2)``, valid since ``J^2 = -I``.
    The result has norm ``|z| / sqrt(1 + alpha^2)``.
    """
    d = 1.0 + alpha * alpha
    return Vec2((z[0] + alpha * z[1]) / d, (z[1] - alpha * z[0]) / d)


def cayley_rotate(alpha: float, z) -> Vec2:
    """Return ``(I + alpha J)^-1 (I - alpha J) z``, a rotation of ``z``."""
    a2 = alpha * alpha
    d = 1.0 + a2
    c = (1.0 - a2) / d
    s = 2.0 * alpha / d
    # rotation by angle -2 atan(alpha)
    return Vec2(c * z[0] + s * z[1], c * z[1] - s * z[0])
