"""Command line entry point ``appush``.

Exit codes: 0 success, 2 configuration error, 3 a run or sweep cell failed,
4 a rate fit or invariant check failed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .diagnostics import gc_transform_series
from .errors import ConfigError, PusherError
from .fields import make_field
from .harness.checks import run_checks
from .harness.config import SweepConfig, normalize_mode
from .harness.rates import fit_table
from .harness.report import emit_reports, rate_summary, read_csv_rows, write_trajectory_csv
from .harness.sweep import run_sweep
from .scheme_ap import AugmentedState, SchemeParams, ap_solve, steps_for

EXIT_OK, EXIT_CONFIG, EXIT_CELL, EXIT_RATES = 0, 2, 3, 4

log = logging.getLogger("ap_pusher")


def _field_selector(args) -> dict:
    if args.field == "disk":
        return {"name": "disk"}
    return {"name": "uniform", "b0": args.b0, "phi": args.phi}


def cmd_simulate(args) -> int:
    try:
        model = make_field(_field_selector(args))
        p = SchemeParams(args.eps, args.dt, args.T)
        steps_for(p.T, p.dt)
        init = AugmentedState.from_phase(args.x0, args.v0)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        traj = ap_solve(init, p, model)
    except PusherError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_CELL
    xgc, egc = gc_transform_series(traj.x, traj.e, traj.w, args.eps, model)
    if args.out == "-":
        write_trajectory_csv(traj, xgc, egc, sys.stdout)
    else:
        write_trajectory_csv(traj, xgc, egc, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        cfg = SweepConfig.load(args.config) if args.config else SweepConfig()
        if args.workers is not None:
            cfg.parallel_workers = args.workers
            cfg.validate()
        modes = [normalize_mode(args.mode)] if args.mode else list(cfg.comparisons)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    tables = {}
    for mode in modes:
        if mode not in cfg.comparisons:
            cfg.comparisons.append(mode)
        log.info("running %s sweep over %d x %d cells", mode, len(cfg.eps_grid), len(cfg.dt_grid))
        tables[mode] = run_sweep(cfg, mode)
    outcomes = emit_reports(tables, args.out, cfg, per_step=args.per_step)
    sys.stdout.write(rate_summary(outcomes))
    failed = [c for t in tables.values() for c in t if c.status == "failed"]
    for c in failed:
        print(f"cell eps={c.eps:g} dt={c.dt:g} {c.variable_set}: {c.message}", file=sys.stderr)
    return EXIT_CELL if failed else EXIT_OK


def cmd_rates(args) -> int:
    paths = []
    for p in map(Path, args.csv):
        if p.is_dir():
            paths += sorted(q for q in p.glob("*.csv") if not q.stem.endswith("_steps"))
        else:
            paths.append(p)
    rows = []
    try:
        for p in paths:
            rows += read_csv_rows(p)
    except (OSError, KeyError, ValueError) as exc:
        print(f"cannot read sweep tables: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    outcomes = fit_table(rows)
    text = rate_summary(outcomes)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_RATES if any(not o.passed for o in outcomes) else EXIT_OK


def cmd_check(args) -> int:
    results = run_checks(args.seed)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_RATES


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="appush", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one AP trajectory and write the per-step CSV")
    sim.add_argument("--field", choices=["disk", "uniform"], default="disk")
    sim.add_argument("--b0", type=float, default=1.0, help="uniform field amplitude")
    sim.add_argument("--phi", choices=["zero", "quadratic"], default="zero", help="uniform field potential")
    sim.add_argument("--eps", type=float, required=True)
    sim.add_argument("--dt", type=float, required=True)
    sim.add_argument("--T", type=float, default=1.0)
    sim.add_argument("--x0", type=float, nargs=2, default=(2.0, 2.0))
    sim.add_argument("--v0", type=float, nargs=2, default=(3.0, 3.0))
    sim.add_argument("--out", default="-", help="output CSV (default stdout)")
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="run an (eps, dt) sweep and write tables and reports")
    sw.add_argument("--mode", choices=["convergence", "asymp-discrete", "asymp-continuous"])
    sw.add_argument("--config", help="JSON sweep config")
    sw.add_argument("--out", default="sweep-out")
    sw.add_argument("--workers", type=int)
    sw.add_argument("--per-step", action="store_true", help="also write per-step errors")
    sw.set_defaults(func=cmd_sweep)

    rt = sub.add_parser("rates", help="fit slopes from sweep CSV files")
    rt.add_argument("csv", nargs="+", help="sweep CSV files or directories")
    rt.add_argument("--out", help="write the report here instead of stdout")
    rt.set_defaults(func=cmd_rates)

    ck = sub.add_parser("check", help="run the invariant checks")
    ck.add_argument("--seed", type=int, default=0)
    ck.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
