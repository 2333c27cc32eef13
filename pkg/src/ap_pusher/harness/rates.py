"""Log-log rate fits and the regime split of the error bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateFit

STIFF_RESOLVED = "stiff-resolved"
AP_PLATEAU = "ap-plateau"
COARSE = "coarse"


def classify_regime(eps: float, dt: float) -> str:
    """Which branch of ``min(eps + dt^2, dt^2 / eps^5)`` is active.

    ``dt <= eps^3`` is stiff-resolved, ``eps^3 < dt <= sqrt(eps)`` is the
    eps-dominated plateau and larger steps are coarse.
    """
    if dt <= eps**3:
        return STIFF_RESOLVED
    if dt <= math.sqrt(eps):
        return AP_PLATEAU
    return COARSE


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    window: tuple[int, int]
    axis: str
    n_points: int

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "window": list(self.window),
            "axis": self.axis,
            "n_points": self.n_points,
        }


def fit_rate(points, window: tuple[int, int] | None = None, axis: str = "dt") -> RateFit:
    """Least-squares slope of ``log(error)`` against ``log(param)``.

    ``points`` is a sequence of ``(param, error)``; ``window`` selects the
    half-open index range ``[start, stop)`` after sorting by param.  Points
    with non-positive or non-finite entries are dropped.

    Raises:
        DegenerateFit: fewer than three usable points, or all params equal.
    """
    pts = sorted((float(p), float(e)) for p, e in points)
    if window is None:
        window = (0, len(pts))
    start, stop = window
    usable = [
        (p, e) for p, e in pts[start:stop] if p > 0 and e > 0 and math.isfinite(p) and math.isfinite(e)
    ]
    if len(usable) < 3:
        raise DegenerateFit(f"need at least 3 usable points, got {len(usable)}")
    lx = np.log([p for p, _ in usable])
    ly = np.log([e for _, e in usable])
    if np.ptp(lx) == 0:
        raise DegenerateFit("parameter values have zero variance")
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(float(slope), float(intercept), r2, (start, stop), axis, len(usable))


@dataclass(frozen=True)
class RateTarget:
    """A theoretical slope and the cells it applies to."""

    mode: str
    variable_set: str
    axis: str  # slope taken along this parameter, the other one held fixed
    slope: float
    tol: float
    regimes: tuple[str, ...]
    source: str

    def describe(self) -> str:
        return f"{self.mode}/{self.variable_set} vs {self.axis} on {'+'.join(self.regimes)}"


COMPARAND_FOR_MODE = {
    "convergence": "reference-stiff",
    "asymptotic-discrete": "limit-scheme",
    "asymptotic-continuous": "limit-reference",
}

_ALL = (STIFF_RESOLVED, AP_PLATEAU, COARSE)

RATE_TARGETS: tuple[RateTarget, ...] = (
    RateTarget("convergence", "x_e", "dt", 2.0, 0.25, (STIFF_RESOLVED,), "dt^2 / eps^5"),
    RateTarget("convergence", "x_e", "eps", -5.0, 0.7, (STIFF_RESOLVED,), "dt^2 / eps^5"),
    RateTarget("convergence", "xgc_egc", "dt", 2.0, 0.25, (STIFF_RESOLVED,), "dt^2 / eps^4"),
    RateTarget("convergence", "xgc_egc", "eps", -4.0, 0.7, (STIFF_RESOLVED,), "dt^2 / eps^4"),
    RateTarget("convergence", "w", "dt", 2.0, 0.25, (STIFF_RESOLVED,), "second order"),
    RateTarget("asymptotic-discrete", "x_e", "eps", 1.0, 0.25, _ALL, "eps"),
    RateTarget("asymptotic-discrete", "xgc_egc", "eps", 2.0, 0.25, _ALL, "eps^2"),
    RateTarget("asymptotic-continuous", "x_e", "eps", 1.0, 0.25, (STIFF_RESOLVED, AP_PLATEAU), "eps + dt^2"),
    RateTarget("asymptotic-continuous", "xgc_egc", "eps", 2.0, 0.25, (STIFF_RESOLVED, AP_PLATEAU), "eps^2 + dt^2"),
)


@dataclass(frozen=True)
class FitOutcome:
    target: RateTarget
    fixed: float  # value of the parameter held fixed
    fit: RateFit | None
    points: tuple[tuple[float, float], ...]
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.fit is not None and abs(self.fit.slope - self.target.slope) <= self.target.tol

    def line(self) -> str:
        other = "eps" if self.target.axis == "dt" else "dt"
        head = f"{self.target.describe()} at {other}={self.fixed:.6g}"
        if self.fit is None:
            return f"{head}: no fit ({self.message})"
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{head}: slope {self.fit.slope:+.3f} target {self.target.slope:+.2f} "
            f"+/- {self.target.tol:.2f} r2={self.fit.r_squared:.4f} "
            f"n={self.fit.n_points} [{self.target.source}] {status}"
        )


def fit_table(rows) -> list[FitOutcome]:
    """Fit every applicable target on sweep rows.

    ``rows`` are mappings with the sweep CSV columns.  Rows are restricted to
    ``status == "ok"`` and to the target's regimes before fitting; groups
    with fewer than three such cells are skipped silently.
    """
    outcomes = []
    for target in RATE_TARGETS:
        other = "eps" if target.axis == "dt" else "dt"
        groups: dict[float, list[tuple[float, float]]] = {}
        for r in rows:
            if (
                r["comparand"] != COMPARAND_FOR_MODE[target.mode]
                or r["variable_set"] != target.variable_set
                or r["status"] != "ok"
                or r["regime"] not in target.regimes
            ):
                continue
            groups.setdefault(float(r[other]), []).append((float(r[target.axis]), float(r["l1_error"])))
        for fixed in sorted(groups):
            pts = tuple(sorted(groups[fixed]))
            if len(pts) < 3:
                continue
            try:
                fit = fit_rate(pts, axis=target.axis)
                outcomes.append(FitOutcome(target, fixed, fit, pts))
            except DegenerateFit as exc:
                outcomes.append(FitOutcome(target, fixed, None, pts, str(exc)))
    return outcomes
