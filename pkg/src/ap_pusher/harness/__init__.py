"""Parameter sweeps, rate fits and reports."""

from .config import SweepConfig
from .rates import RateFit, classify_regime, fit_rate, fit_table
from .report import emit_reports, read_csv_rows
from .sweep import CellResult, run_asymptotic_sweep, run_convergence_sweep, run_sweep

__all__ = [
    "CellResult",
    "RateFit",
    "SweepConfig",
    "classify_regime",
    "emit_reports",
    "fit_rate",
    "fit_table",
    "read_csv_rows",
    "run_asymptotic_sweep",
    "run_convergence_sweep",
    "run_sweep",
]
