import json
import math

import numpy as np
import pytest

from ap_pusher import ConfigError, DegenerateFit
from ap_pusher.cli import main
from ap_pusher.harness import (
    SweepConfig,
    classify_regime,
    emit_reports,
    fit_rate,
    run_asymptotic_sweep,
    run_convergence_sweep,
)
from ap_pusher.harness.report import SWEEP_COLUMNS, TRAJECTORY_COLUMNS, read_csv_rows
from ap_pusher.harness.sweep import CellResult


def small_config(**kw):
    base = dict(eps_grid=[0.5, 0.25], dt_grid=[0.125, 0.0625, 0.03125], T=0.5)
    base.update(kw)
    return SweepConfig(**base)


@pytest.mark.parametrize(
    "eps,dt,label",
    [(0.1, 1e-4, "stiff-resolved"), (0.1, 0.01, "ap-plateau"), (0.01, 0.5, "coarse"), (0.5, 0.125, "stiff-resolved")],
)
def test_classify_regime(eps, dt, label):
    assert classify_regime(eps, dt) == label


def test_fit_rate_exact_power_law():
    fit = fit_rate([(h, 3.0 * h**2) for h in (0.1, 0.05, 0.025, 0.0125)])
    assert fit.slope == pytest.approx(2.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.n_points == 4


def test_fit_rate_constant_and_window():
    assert fit_rate([(h, 0.7) for h in (1, 2, 3, 4)]).slope == pytest.approx(0.0, abs=1e-12)
    pts = [(1, 1.0), (2, 4.0), (4, 16.0), (8, 64.0), (16, 1.0)]
    fit = fit_rate(pts, window=(0, 4), axis="eps")
    assert fit.slope == pytest.approx(2.0) and fit.axis == "eps" and fit.window == (0, 4)


def test_fit_rate_degenerate():
    with pytest.raises(DegenerateFit):
        fit_rate([(1, 1.0), (2, 2.0)])
    with pytest.raises(DegenerateFit):
        fit_rate([(1, 1.0), (1, 2.0), (1, 3.0)])
    with pytest.raises(DegenerateFit):
        fit_rate([(1, 1.0), (2, 0.0), (3, math.nan), (4, 2.0)])


def test_config_defaults_are_valid():
    cfg = SweepConfig()
    assert len(cfg.eps_grid) == 11 and cfg.eps_grid[-1] == 2.0**-10
    assert len(cfg.dt_grid) == 11 and all(abs(round(1 / dt) * dt - 1) < 1e-12 for dt in cfg.dt_grid)
    assert SweepConfig.from_dict(cfg.to_dict()) == cfg


def test_config_rejects_bad_input(tmp_path):
    with pytest.raises(ConfigError):
        SweepConfig.from_dict({"eps_grid": [0.5], "bogus": 1})
    with pytest.raises(ConfigError):
        SweepConfig(dt_grid=[0.3])
    with pytest.raises(ConfigError):
        SweepConfig(eps_grid=[])
    with pytest.raises(ConfigError):
        SweepConfig(comparisons=["nonsense"])
    with pytest.raises(ConfigError):
        SweepConfig(x0=(9.0, 9.0))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        SweepConfig.load(bad)


def test_config_accepts_label_aliases():
    cfg = SweepConfig(variables=["(x,e)", "(x_gc,e_gc)", "w"], comparisons=["asymp-discrete"])
    assert cfg.variables == ["x_e", "xgc_egc", "w"]
    assert cfg.comparisons == ["asymptotic-discrete"]


def test_empty_comparisons_give_empty_tables():
    cfg = small_config(comparisons=[])
    assert run_convergence_sweep(cfg) == []
    assert run_asymptotic_sweep(cfg, "discrete") == []


def test_emit_empty_table_writes_header_only(tmp_path):
    emit_reports({"convergence": []}, tmp_path)
    text = (tmp_path / "convergence.csv").read_text()
    assert text == ",".join(SWEEP_COLUMNS) + "\n"
    assert (tmp_path / "rates.txt").exists()
    assert json.loads((tmp_path / "manifest.json").read_text())["cells"] == []


def test_emit_one_cell_row(tmp_path):
    cell = CellResult(0.5, 0.25, "x_e", "reference-stiff", "ok", np.array([0.0, 1.0, 3.0]), 1e-13)
    emit_reports({"convergence": [cell]}, tmp_path)
    rows = read_csv_rows(tmp_path / "convergence.csv")
    assert len(rows) == 1
    r = rows[0]
    assert all(r[k] != "" for k in SWEEP_COLUMNS)
    assert r["l1_error"] == 2.0 and r["lambda"] == 1.0 and r["regime"] == "ap-plateau"


def test_sweep_round_trip_per_step(tmp_path):
    cfg = small_config(variables=["x_e", "xgc_egc", "w"], comparisons=["convergence", "asymptotic-discrete"])
    tables = {"convergence": run_convergence_sweep(cfg), "asymptotic-discrete": run_asymptotic_sweep(cfg, "discrete")}
    assert len(tables["convergence"]) == 2 * 3 * 3
    assert len(tables["asymptotic-discrete"]) == 2 * 3 * 2
    emit_reports(tables, tmp_path, cfg, per_step=True)
    for mode in tables:
        rows = read_csv_rows(tmp_path / f"{mode}.csv")
        steps = read_csv_rows(tmp_path / f"{mode}_steps.csv")
        for r in rows:
            assert r["status"] == "ok"
            assert r["regime"] == classify_regime(r["eps"], r["dt"])
            errs = [
                s["error"] for s in steps
                if (s["eps"], s["dt"], s["variable_set"]) == (r["eps"], r["dt"], r["variable_set"]) and s["n"] >= 1
            ]
            assert abs(np.mean(errs) - r["l1_error"]) <= 1e-12
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["config"]["T"] == 0.5 and "norm_convention" in manifest


def test_sweep_deterministic_across_workers(tmp_path):
    out = []
    for workers in (1, 2):
        cfg = small_config(parallel_workers=workers, comparisons=["convergence"])
        emit_reports({"convergence": run_convergence_sweep(cfg)}, tmp_path / str(workers), cfg)
        out.append((tmp_path / str(workers) / "convergence.csv").read_bytes())
    assert out[0] == out[1]


def test_uniform_single_cell_sweep():
    cfg = SweepConfig(
        eps_grid=[0.5], dt_grid=[0.0625], T=0.5, x0=(0.0, 0.0), v0=(1.0, 0.0),
        field={"name": "uniform"}, comparisons=["convergence"], variables=["x_e", "w"],
        ref_points_per_gyroperiod=400,
    )
    cells = {c.variable_set: c for c in run_convergence_sweep(cfg)}
    assert all(c.status == "ok" for c in cells.values())
    # both sides rotate w at fixed speed: the position error is what remains
    assert cells["x_e"].l1_error > 1e-4
    assert math.isfinite(cells["w"].l1_error)


def test_failing_cells_are_recorded_not_raised():
    cfg = small_config(eps_grid=[0.5], dt_grid=[0.5], max_ref_steps=10, comparisons=["convergence"])
    cells = run_convergence_sweep(cfg)
    assert cells and all(c.status == "skipped" for c in cells)
    assert all("StepBudgetExceeded" in c.message for c in cells)


def test_cli_simulate(tmp_path, capsys):
    out = tmp_path / "traj.csv"
    assert main(["simulate", "--eps", "0.5", "--dt", "0.125", "--T", "0.5", "--out", str(out)]) == 0
    rows = read_csv_rows(out)
    assert list(rows[0]) == TRAJECTORY_COLUMNS and len(rows) == 5
    assert main(["simulate", "--eps", "0.5", "--dt", "0.3", "--T", "1"]) == 2
    assert main(["simulate", "--eps", "1", "--dt", "10", "--T", "10"]) == 3


def test_cli_sweep_and_rates(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"eps_grid": [0.5], "dt_grid": [0.125, 0.0625, 0.03125], "T": 0.5}))
    out = tmp_path / "out"
    assert main(["sweep", "--mode", "convergence", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "convergence.csv").exists()
    assert main(["rates", str(out), "--out", str(tmp_path / "r.txt")]) in (0, 4)
    assert "fitted slopes" in (tmp_path / "r.txt").read_text()


def test_cli_config_error(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"eps_grid": [0.5], "typo": 1}))
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert main(["rates", str(tmp_path / "missing.csv")]) == 2


def test_cli_check(capsys):
    assert main(["check"]) == 0
    assert "FAIL" not in capsys.readouterr().out
