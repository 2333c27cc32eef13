"""Sweep configuration and its JSON form."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

from ..errors import ConfigError
from ..fields import make_field

COMPARISONS = ("convergence", "asymptotic-discrete", "asymptotic-continuous")
VARIABLES = ("x_e", "xgc_egc", "w")

_VARIABLE_ALIASES = {
    "x_e": "x_e",
    "(x,e)": "x_e",
    "xgc_egc": "xgc_egc",
    "(x_gc,e_gc)": "xgc_egc",
    "w": "w",
}
_MODE_ALIASES = {
    "convergence": "convergence",
    "asymptotic-discrete": "asymptotic-discrete",
    "asymp-discrete": "asymptotic-discrete",
    "asymptotic-continuous": "asymptotic-continuous",
    "asymp-continuous": "asymptotic-continuous",
}


def dyadic_dt_grid(T: float, kmin: int = 4, kmax: int = 14) -> list[float]:
    """``dt ~ 2^-k`` adjusted so that ``T / dt`` is an integer."""
    return [T / max(1, round(T * 2.0**k)) for k in range(kmin, kmax + 1)]


def normalize_mode(mode: str) -> str:
    try:
        return _MODE_ALIASES[mode]
    except KeyError:
        raise ConfigError(f"unknown comparison {mode!r}") from None


@dataclass
class SweepConfig:
    eps_grid: list[float] = dataclasses.field(default_factory=lambda: [2.0**-k for k in range(0, 11)])
    dt_grid: list[float] = dataclasses.field(default_factory=lambda: dyadic_dt_grid(1.0))
    T: float = 1.0
    x0: tuple[float, float] = (2.0, 2.0)
    v0: tuple[float, float] = (3.0, 3.0)
    field: str | dict = "disk"
    comparisons: list[str] = dataclasses.field(default_factory=lambda: list(COMPARISONS))
    variables: list[str] = dataclasses.field(default_factory=lambda: ["x_e", "xgc_egc"])
    parallel_workers: int = 1
    ref_points_per_gyroperiod: int = 40
    max_ref_steps: int = 10**8

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not self.eps_grid or not self.dt_grid:
            raise ConfigError("eps_grid and dt_grid must be nonempty")
        for name in ("T",):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be a positive finite number")
        for eps in self.eps_grid:
            if not (math.isfinite(eps) and eps > 0):
                raise ConfigError(f"bad eps {eps!r}")
        for dt in self.dt_grid:
            if not (math.isfinite(dt) and dt > 0):
                raise ConfigError(f"bad dt {dt!r}")
            n = round(self.T / dt)
            if n < 1 or abs(n * dt - self.T) > 1e-12 * self.T:
                raise ConfigError(f"dt={dt!r} does not divide T={self.T!r}")
        for vec in (self.x0, self.v0):
            if len(vec) != 2 or not all(math.isfinite(c) for c in vec):
                raise ConfigError(f"bad vector {vec!r}")
        self.x0 = (float(self.x0[0]), float(self.x0[1]))
        self.v0 = (float(self.v0[0]), float(self.v0[1]))
        self.comparisons = [normalize_mode(c) for c in self.comparisons]
        try:
            self.variables = [_VARIABLE_ALIASES[v] for v in self.variables]
        except KeyError as exc:
            raise ConfigError(f"unknown variable set {exc.args[0]!r}") from None
        if self.parallel_workers < 1:
            raise ConfigError("parallel_workers must be >= 1")
        make_field(self.field)
        if not make_field(self.field).domain_guard(self.x0):
            raise ConfigError(f"x0={self.x0} is outside the field domain")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["x0"] = list(self.x0)
        d["v0"] = list(self.v0)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path: str | Path) -> "SweepConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)
