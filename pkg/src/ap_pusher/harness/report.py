"""CSV tables, rate summaries and run manifests."""

from __future__ import annotations

import csv
import json
import platform
from pathlib import Path

import numpy as np

from .. import __version__
from ..diagnostics import NORM_CONVENTION
from .rates import RATE_TARGETS, FitOutcome, fit_table

SWEEP_COLUMNS = [
    "eps", "dt", "lambda", "regime", "variable_set", "comparand", "l1_error", "max_fp_residual", "status",
]
STEP_ERROR_COLUMNS = ["eps", "dt", "variable_set", "comparand", "n", "error"]
TRAJECTORY_COLUMNS = [
    "n", "t", "x1", "x2", "e", "w1", "w2", "xgc1", "xgc2", "egc", "fp_iterations", "fp_residual",
]
_FLOAT_COLUMNS = {"eps", "dt", "lambda", "l1_error", "max_fp_residual", "error", "t"}


def fmt(v: float) -> str:
    """Round-trip exact scientific notation."""
    return f"{float(v):.17e}"


def _open_csv(path: Path):
    try:
        fh = open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return fh, csv.writer(fh, lineterminator="\n")


def write_sweep_csv(cells, path: Path) -> Path:
    path = Path(path)
    fh, out = _open_csv(path)
    with fh:
        out.writerow(SWEEP_COLUMNS)
        for c in cells:
            r = c.row()
            out.writerow([fmt(r[k]) if k in _FLOAT_COLUMNS else r[k] for k in SWEEP_COLUMNS])
    return path


def write_step_errors_csv(cells, path: Path) -> Path:
    path = Path(path)
    fh, out = _open_csv(path)
    with fh:
        out.writerow(STEP_ERROR_COLUMNS)
        for c in cells:
            if c.per_step_errors is None:
                continue
            head = [fmt(c.eps), fmt(c.dt), c.variable_set, c.comparand]
            for n, err in enumerate(c.per_step_errors):
                out.writerow(head + [n, fmt(err)])
    return path


def read_csv_rows(path: Path) -> list[dict]:
    """Read a CSV written by this module, converting numeric columns."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        for k in list(r):
            if k in _FLOAT_COLUMNS:
                r[k] = float(r[k])
            elif k in ("n", "fp_iterations"):
                r[k] = int(r[k])
    return rows


def write_trajectory_csv(traj, xgc: np.ndarray, egc: np.ndarray, path) -> None:
    """Per-step CSV of an AP trajectory; ``path`` may be a file object."""
    own = not hasattr(path, "write")
    fh = open(path, "w", newline="", encoding="utf-8") if own else path
    try:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(TRAJECTORY_COLUMNS)
        for n in range(len(traj.t)):
            it = int(traj.fp_iterations[n - 1]) if n else 0
            res = float(traj.fp_residual[n - 1]) if n else 0.0
            out.writerow(
                [n, fmt(traj.t[n]), fmt(traj.x[n, 0]), fmt(traj.x[n, 1]), fmt(traj.e[n]),
                 fmt(traj.w[n, 0]), fmt(traj.w[n, 1]), fmt(xgc[n, 0]), fmt(xgc[n, 1]), fmt(egc[n]),
                 it, fmt(res)]
            )
    finally:
        if own:
            fh.close()


def rate_summary(outcomes: list[FitOutcome]) -> str:
    lines = ["# fitted slopes against theoretical rates"]
    if not outcomes:
        lines.append("no fittable groups (each fit needs >= 3 ok cells in its regime window)")
    lines += [o.line() for o in outcomes]
    n_fail = sum(not o.passed for o in outcomes)
    lines.append(f"# {len(outcomes) - n_fail} passed, {n_fail} failed")
    return "\n".join(lines) + "\n"


def build_manifest(cfg, tables: dict, outcomes: list[FitOutcome]) -> dict:
    cells = []
    for mode, table in tables.items():
        for c in table:
            entry = {"mode": mode, **c.row(), "message": c.message}
            entry.update(c.info)
            cells.append(entry)
    return {
        "package_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config": cfg.to_dict() if cfg is not None else None,
        "norm_convention": NORM_CONVENTION,
        "scheme_tolerances": {"fp_rtol": 1e-12, "fp_atol": 1e-14, "fp_max_iter": 200, "inner_max_iter": 50},
        "regimes": {
            "stiff-resolved": "dt <= eps^3",
            "ap-plateau": "eps^3 < dt <= eps^(1/2)",
            "coarse": "dt > eps^(1/2)",
        },
        "fit_windows": [
            {
                "mode": t.mode, "variable_set": t.variable_set, "axis": t.axis,
                "target": t.slope, "tol": t.tol, "regimes": list(t.regimes),
            }
            for t in RATE_TARGETS
        ],
        "fits": [
            {
                "mode": o.target.mode, "variable_set": o.target.variable_set, "axis": o.target.axis,
                "fixed": o.fixed, "target": o.target.slope, "passed": o.passed,
                "fit": o.fit.to_dict() if o.fit else None, "message": o.message,
            }
            for o in outcomes
        ],
        "cells": cells,
    }


def emit_reports(tables: dict, destination, cfg=None, per_step: bool = False) -> list[FitOutcome]:
    """Write ``<mode>.csv`` per sweep, ``rates.txt`` and ``manifest.json``.

    ``tables`` maps comparison mode to its list of cells.  With ``per_step``
    each sweep also gets ``<mode>_steps.csv`` holding every per-step error.
    Returns the fit outcomes used in the summary.
    """
    dest = Path(destination)
    try:
        dest.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {dest}: {exc}") from exc
    rows = []
    for mode, cells in tables.items():
        write_sweep_csv(cells, dest / f"{mode}.csv")
        if per_step:
            write_step_errors_csv(cells, dest / f"{mode}_steps.csv")
        rows += [c.row() for c in cells]
    outcomes = fit_table(rows)
    (dest / "rates.txt").write_text(rate_summary(outcomes), encoding="utf-8")
    manifest = build_manifest(cfg, tables, outcomes)
    (dest / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return outcomes
