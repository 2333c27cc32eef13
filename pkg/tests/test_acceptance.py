"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from ap_pusher import AugmentedState, DiskField, SchemeParams, Vec2, ap_solve, ap_step
from ap_pusher.harness import SweepConfig, fit_rate, run_asymptotic_sweep, run_convergence_sweep
from ap_pusher.harness.checks import run_checks
from oracles import ap_step_oracle, random_disk_point

HERE = Path(__file__).parent
MODEL = DiskField()


@pytest.fixture
def report(capsys):
    def emit(label, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        assert ok, detail

    return emit


def table(cells, variable_set):
    return {(c.eps, c.dt): c for c in cells if c.variable_set == variable_set}


def fitted(cells, variable_set, axis):
    rows = [c for c in cells if c.variable_set == variable_set]
    assert all(c.status == "ok" for c in rows), [c.message for c in rows if c.status != "ok"]
    return fit_rate([(getattr(c, axis), c.l1_error) for c in rows], axis=axis)


@pytest.fixture(scope="module")
def stiff_column():
    # shared by criteria 2, 3 and 7
    cfg = SweepConfig(eps_grid=[2.0**-k for k in range(1, 5)], dt_grid=[2.0**-14], comparisons=["convergence"])
    return run_convergence_sweep(cfg)


def test_ac1_nonstiff_second_order(report):
    t0 = time.perf_counter()
    cfg = SweepConfig(eps_grid=[0.5], dt_grid=[2.0**-k for k in range(5, 11)], comparisons=["convergence"], variables=["x_e"])
    fit = fitted(run_convergence_sweep(cfg), "x_e", "dt")
    took = time.perf_counter() - t0
    ok = 1.8 <= fit.slope <= 2.2 and took < 60
    report("AC1 nonstiff dt^2 order", ok, f"slope {fit.slope:.3f} in [1.8, 2.2], r2 {fit.r_squared:.4f}, {took:.1f}s")


def test_ac2_stiff_blowup(report, stiff_column):
    assert all(c.regime == "stiff-resolved" for c in stiff_column)
    fit = fitted(stiff_column, "x_e", "eps")
    report("AC2 stiff eps slope (x,e)", -5.7 <= fit.slope <= -4.3, f"slope {fit.slope:.3f} in [-5.7, -4.3]")


def test_ac3_gc_stiff_convergence(report, stiff_column):
    fit = fitted(stiff_column, "xgc_egc", "eps")
    report("AC3 stiff eps slope (x_gc,e_gc)", -4.5 <= fit.slope <= -3.0, f"slope {fit.slope:.3f} in [-4.5, -3.0]")


def test_ac4_discrete_asymptotic_rates(report):
    t0 = time.perf_counter()
    cfg = SweepConfig(eps_grid=[2.0**-k for k in range(2, 10)], dt_grid=[2.0**-8], comparisons=["asymptotic-discrete"])
    cells = run_asymptotic_sweep(cfg, "discrete")
    fx = fitted(cells, "x_e", "eps")
    fg = fitted(cells, "xgc_egc", "eps")
    took = time.perf_counter() - t0
    ok = 0.85 <= fx.slope <= 1.25 and 1.7 <= fg.slope <= 2.3 and took < 120
    report(
        "AC4 discrete asymptotic eps rates", ok,
        f"(x,e) slope {fx.slope:.3f} in [0.85, 1.25], GC slope {fg.slope:.3f} in [1.7, 2.3], {took:.1f}s",
    )


def test_ac5_continuous_plateau(report):
    dts = [2.0**-k for k in range(6, 11)]
    cfg = SweepConfig(eps_grid=[2.0**-4, 2.0**-5], dt_grid=dts, comparisons=["asymptotic-continuous"])
    cells = run_asymptotic_sweep(cfg, "continuous")
    detail, ok = [], True
    floors = {}
    for var, lo, hi in (("x_e", 1.6, 2.6), ("xgc_egc", 3.0, 5.5)):
        tab = table(cells, var)
        for eps in cfg.eps_grid:
            tail = np.array([tab[eps, dt].l1_error for dt in dts[-3:]])
            # a floor: the three finest steps agree to 25%
            flat = tail.max() / tail.min() <= 1.25
            ok &= bool(flat)
            floors[var, eps] = tail.mean()
        ratio = floors[var, 2.0**-4] / floors[var, 2.0**-5]
        ok &= lo <= ratio <= hi
        detail.append(f"{var} floor ratio {ratio:.3f} in [{lo}, {hi}]")
    report("AC5 continuous asymptotic plateau", ok, "; ".join(detail))


def test_ac6_uniform_accuracy(report):
    cfg = SweepConfig(
        eps_grid=[2.0**-k for k in range(1, 6)], dt_grid=[2.0**-6, 2.0**-9], comparisons=["convergence"], variables=["x_e"]
    )
    cells = run_convergence_sweep(cfg)
    assert all(c.status == "ok" for c in cells)
    worst = {dt: max(c.l1_error for c in cells if c.dt == dt) for dt in cfg.dt_grid}
    factor = worst[2.0**-6] / worst[2.0**-9]
    report("AC6 uniform-in-eps accuracy", factor >= 1.7, f"max error drops by {factor:.3f} >= 1.7 for dt/8")


def test_ac7_exact_discrete_invariant(report):
    worst = 0.0
    runs = [(2.0**-k, 2.0**-14) for k in range(1, 5)] + [(e, 2.0**-8) for e in (1.0, 1e-2, 1e-4)]
    for eps, dt in runs:
        tr = ap_solve(AugmentedState.from_phase((2.0, 2.0), (3.0, 3.0)), SchemeParams(eps, dt), MODEL)
        inv = tr.e + 0.5 * np.sum(tr.x**2, axis=1)
        worst = max(worst, float(np.max(np.abs(inv - inv[0]))))
    report("AC7 exact discrete invariant", worst <= 1e-10, f"max drift {worst:.2e} <= 1e-10 over {len(runs)} runs")


def test_ac8_solvability_uniform_in_eps(report):
    iters, resid = {}, 0.0
    for eps in (1.0, 1e-1, 1e-2, 1e-3, 1e-4):
        tr = ap_solve(AugmentedState.from_phase((2.0, 2.0), (3.0, 3.0)), SchemeParams(eps, 2.0**-6), MODEL)
        iters[eps] = int(tr.fp_iterations.max())
        resid = max(resid, tr.max_fp_residual)
    spread = max(iters.values()) / min(iters.values())
    ok = max(iters.values()) <= 200 and resid <= 1e-12 and spread < 3
    report("AC8 solvability uniform in eps", ok, f"max iterations {iters}, spread {spread:.2f} < 3, residual {resid:.1e}")


def test_ac9_oracle_equivalence(report):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(200):
        x = random_disk_point(rng, 9.0)
        w = rng.normal(scale=3.0, size=2)
        e = 0.5 * w @ w + rng.normal()
        eps = 10 ** rng.uniform(-2, 0)
        dt = 10 ** rng.uniform(-4, -2)
        new, _ = ap_step(AugmentedState(Vec2(*x), e, Vec2(*w)), SchemeParams(eps, dt), MODEL)
        ox, oe, ow = ap_step_oracle(MODEL, x, e, w, eps, dt)
        worst = max(worst, float(np.max(np.abs(np.r_[new.x, new.e, new.w] - np.r_[ox, oe, ow]))))
    report("AC9 oracle equivalence", worst <= 1e-10, f"max deviation {worst:.2e} <= 1e-10 over 200 steps")


def test_ac10_property_suites(report):
    t0 = time.perf_counter()
    checks = run_checks()
    modules = ["test_geometry.py", "test_fields.py", "test_diagnostics.py", "test_scheme_limit.py", "test_scheme_ap.py"]
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *modules],
        cwd=HERE, capture_output=True, text=True,
    )
    took = time.perf_counter() - t0
    bad = [name for name, ok, _ in checks if not ok]
    ok = not bad and proc.returncode == 0 and took < 300
    last = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    report("AC10 property suites", ok, f"{len(checks) - len(bad)}/{len(checks)} checks, pytest: {last}, {took:.1f}s")
