"""Sweeps of the AP pusher over (eps, dt) grids.

The unit of work is one eps column: the reference solution for that eps is
computed once, sampled on the finest requested grid, and subsampled for the
coarser steps.  Columns are independent, so they run in a process pool and
the collected cells are sorted before anything is written.
"""

from __future__ import annotations

import logging
import math
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..diagnostics import gc_transform, gc_transform_series, pointwise_errors, stack_xe
from ..errors import PusherError, StepBudgetExceeded
from ..fields import make_field
from ..geometry import Vec2
from ..reference import LimitState, PhaseState, RefSolverConfig, reference_solve_limit, reference_solve_stiff
from ..scheme_ap import AugmentedState, SchemeParams, ap_solve
from ..scheme_limit import LimitSchemeState, limit_solve
from .config import SweepConfig, normalize_mode
from .rates import COMPARAND_FOR_MODE, classify_regime

log = logging.getLogger(__name__)


@dataclass
class CellResult:
    """Errors of one (eps, dt, variable_set) cell against one comparand."""

    eps: float
    dt: float
    variable_set: str
    comparand: str
    status: str  # ok | failed | skipped
    per_step_errors: np.ndarray | None = None
    max_fp_residual: float = math.nan
    message: str = ""
    info: dict = field(default_factory=dict)

    @property
    def lam(self) -> float:
        return self.dt / (self.eps * self.eps)

    @property
    def regime(self) -> str:
        return classify_regime(self.eps, self.dt)

    @property
    def l1_error(self) -> float:
        if self.per_step_errors is None or len(self.per_step_errors) < 2:
            return math.nan
        return float(np.mean(self.per_step_errors[1:]))

    def row(self) -> dict:
        return {
            "eps": self.eps,
            "dt": self.dt,
            "lambda": self.lam,
            "regime": self.regime,
            "variable_set": self.variable_set,
            "comparand": self.comparand,
            "l1_error": self.l1_error,
            "max_fp_residual": self.max_fp_residual,
            "status": self.status,
        }

    def sort_key(self):
        return (self.eps, self.dt, self.variable_set, self.comparand)


def _variables_for(mode: str, variables: list[str]) -> list[str]:
    # w has no counterpart on the limit side
    if mode == "convergence":
        return list(variables)
    return [v for v in variables if v != "w"]


def _failed(eps, dt, variables, comparand, exc: Exception) -> list[CellResult]:
    status = "skipped" if isinstance(exc, StepBudgetExceeded) else "failed"
    msg = f"{type(exc).__name__}: {exc}"
    return [CellResult(eps, dt, v, comparand, status, message=msg) for v in variables]


def _ap_run(cfg: SweepConfig, eps: float, dt: float, model):
    init = AugmentedState.from_phase(cfg.x0, cfg.v0)
    return init, ap_solve(init, SchemeParams(eps, dt, cfg.T), model)


def _convergence_column(cfg, eps, model, variables, steps) -> list[CellResult]:
    comparand = COMPARAND_FOR_MODE["convergence"]
    rcfg = RefSolverConfig(points_per_gyroperiod=cfg.ref_points_per_gyroperiod, max_steps=cfg.max_ref_steps)
    start = PhaseState(Vec2(*cfg.x0), Vec2(*cfg.v0))
    n_fine = math.lcm(*steps.values())
    if n_fine > 64 * max(steps.values()):
        n_fine = None  # grids are not nested; one reference per dt
    cache: dict[int, tuple] = {}

    def reference(n: int):
        key = n_fine or n
        if key not in cache:
            try:
                ref = reference_solve_stiff(start, eps, cfg.T, model, rcfg, key)
            except PusherError as exc:
                cache[key] = exc
            else:
                ke = ref.kinetic_energy()
                gc = gc_transform_series(ref.x, ke, ref.v, eps, model) if "xgc_egc" in variables else None
                cache[key] = (ref, ke, gc)
        if isinstance(cache[key], Exception):
            raise cache[key]
        ref, ke, gc = cache[key]
        return ref, ke, gc, slice(None, None, key // n)

    results: list[CellResult] = []
    for dt in cfg.dt_grid:
        try:
            ref, ref_e, ref_gc, sl = reference(steps[dt])
        except PusherError as exc:
            log.warning("reference failed for eps=%g dt=%g: %s", eps, dt, exc)
            results += _failed(eps, dt, variables, comparand, exc)
            continue
        try:
            _, tr = _ap_run(cfg, eps, dt, model)
        except PusherError as exc:
            results += _failed(eps, dt, variables, comparand, exc)
            continue
        info = {"ref_internal_steps": ref.internal_steps, "ref_energy_drift": ref.energy_drift}
        for var in variables:
            if var == "x_e":
                err = pointwise_errors(stack_xe(tr.x, tr.e), stack_xe(ref.x[sl], ref_e[sl]))
            elif var == "xgc_egc":
                xg, eg = gc_transform_series(tr.x, tr.e, tr.w, eps, model)
                err = pointwise_errors(stack_xe(xg, eg), stack_xe(ref_gc[0][sl], ref_gc[1][sl]))
            else:
                err = pointwise_errors(tr.w, ref.v[sl])
            results.append(CellResult(eps, dt, var, comparand, "ok", err, tr.max_fp_residual, info=info))
    return results


def run_column(cfg: SweepConfig, mode: str, eps: float) -> list[CellResult]:
    """All dt cells of one eps column for one comparison mode."""
    mode = normalize_mode(mode)
    comparand = COMPARAND_FOR_MODE[mode]
    model = make_field(cfg.field)
    variables = _variables_for(mode, cfg.variables)
    if not variables:
        return []
    steps = {dt: round(cfg.T / dt) for dt in cfg.dt_grid}
    results: list[CellResult] = []

    if mode == "convergence":
        return _convergence_column(cfg, eps, model, variables, steps)

    init = AugmentedState.from_phase(cfg.x0, cfg.v0)
    try:
        gc0 = gc_transform(init.x, init.e, init.w, eps, model)
    except PusherError as exc:
        for dt in cfg.dt_grid:
            results += _failed(eps, dt, variables, comparand, exc)
        return results
    seeds = {"x_e": (init.x, init.e), "xgc_egc": (gc0.x_gc, gc0.e_gc)}
    for dt in cfg.dt_grid:
        try:
            _, tr = _ap_run(cfg, eps, dt, model)
        except PusherError as exc:
            results += _failed(eps, dt, variables, comparand, exc)
            continue
        for var in variables:
            y0, g0 = seeds[var]
            try:
                if mode == "asymptotic-discrete":
                    lim = limit_solve(LimitSchemeState(y0, g0), dt, cfg.T, model)
                else:
                    lim = reference_solve_limit(LimitState(y0, g0), cfg.T, model, n_samples=steps[dt])
            except PusherError as exc:
                results += _failed(eps, dt, [var], comparand, exc)
                continue
            if var == "x_e":
                mine = stack_xe(tr.x, tr.e)
            else:
                mine = stack_xe(*gc_transform_series(tr.x, tr.e, tr.w, eps, model))
            err = pointwise_errors(mine, stack_xe(lim.y, lim.g))
            resid = max(tr.max_fp_residual, getattr(lim, "max_fp_residual", 0.0))
            results.append(CellResult(eps, dt, var, comparand, "ok", err, resid))
    return results


def _column_task(args) -> list[CellResult]:
    cfg_dict, mode, eps = args
    cfg = SweepConfig.from_dict(cfg_dict)
    try:
        return run_column(cfg, mode, eps)
    except Exception as exc:  # keep the sweep alive whatever happens in one column
        log.error("column eps=%g crashed:\n%s", eps, traceback.format_exc())
        variables = _variables_for(normalize_mode(mode), cfg.variables)
        out = []
        for dt in cfg.dt_grid:
            out += _failed(eps, dt, variables, COMPARAND_FOR_MODE[normalize_mode(mode)], exc)
        return out


def _run_sweep(cfg: SweepConfig, mode: str) -> list[CellResult]:
    tasks = [(cfg.to_dict(), mode, eps) for eps in cfg.eps_grid]
    if cfg.parallel_workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallel_workers) as pool:
            chunks = list(pool.map(_column_task, tasks))
    else:
        chunks = [_column_task(t) for t in tasks]
    cells = [c for chunk in chunks for c in chunk]
    cells.sort(key=CellResult.sort_key)
    return cells


def run_convergence_sweep(cfg: SweepConfig) -> list[CellResult]:
    """AP scheme against the resolved stiff reference on every grid cell."""
    if "convergence" not in cfg.comparisons:
        return []
    return _run_sweep(cfg, "convergence")


def run_asymptotic_sweep(cfg: SweepConfig, mode: str) -> list[CellResult]:
    """AP scheme against the limit model, discrete or continuous.

    ``mode`` is ``"discrete"`` (limit scheme at the same dt) or
    ``"continuous"`` (resolved limit reference).  ``x_e`` cells seed the limit
    at ``(x0, e0)``, ``xgc_egc`` cells at the guiding-center transform of the
    initial state.
    """
    full = normalize_mode(mode if mode.startswith("asymp") else f"asymptotic-{mode}")
    if full not in cfg.comparisons:
        return []
    return _run_sweep(cfg, full)


def run_sweep(cfg: SweepConfig, mode: str) -> list[CellResult]:
    mode = normalize_mode(mode)
    if mode == "convergence":
        return run_convergence_sweep(cfg)
    return run_asymptotic_sweep(cfg, mode)
