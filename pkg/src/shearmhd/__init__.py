"""Spectral simulation and verification toolkit for sheared MHD stability.

Covers per-mode linearized dynamics with multiplier-weighted energy
functionals, a dealiased pseudo-spectral nonlinear solver in the moving
frame, randomized audits of the pointwise symbol inequalities, and scaling
experiments (transient growth, enhanced dissipation, stability threshold).
"""

__version__ = "1.0.0"

from .params import Frequency, Params, ValidationError
from .symbols import (
    WeightSet,
    dt_p_symbol,
    evaluate_weights,
    p_symbol,
    p_time_integral,
    resonant_interval,
    weight_m,
    weight_md,
    weight_mnu,
    weight_ms,
)
from .audits import AuditFailure, AuditReport, run_all_audits
from .modes import (
    ModeState,
    ModeTrajectory,
    SymState,
    VerificationFailure,
    integrate_mode,
    linear_rhs,
    sym_transform,
    verify_prop_keylin,
)
from .grid import Grid
from .solver import (
    BlowupDetected,
    MhdState,
    extract_zero_modes,
    invert_delta_L,
    make_initial_data,
    nonlinear_terms,
    step,
    velocity_from_streamfunction,
)
from .snapshots import read_snapshot, write_snapshot
from .diagnostics import (
    BootstrapVerdict,
    EnergyLedger,
    bootstrap_monitor,
    damping_ratios,
    dissipation_fields,
    energy_ho_field,
    energy_sym_field,
    energy_zero_field,
)
from .config import ParseError, RunConfig, parse_config, parse_config_text
from .runner import (
    BisectFailure,
    FitFailure,
    ScanResult,
    decay_rate_scan,
    growth_scan,
    run_simulation,
    threshold_scan,
)

__all__ = [
    "AuditFailure", "AuditReport", "BisectFailure", "BlowupDetected",
    "BootstrapVerdict", "EnergyLedger", "FitFailure", "Frequency", "Grid",
    "MhdState", "ModeState", "ModeTrajectory", "ParseError", "Params",
    "RunConfig", "ScanResult", "SymState", "ValidationError",
    "VerificationFailure", "WeightSet", "bootstrap_monitor", "damping_ratios",
    "decay_rate_scan", "dissipation_fields", "dt_p_symbol", "energy_ho_field",
    "energy_sym_field", "energy_zero_field", "evaluate_weights",
    "extract_zero_modes", "growth_scan", "integrate_mode", "invert_delta_L",
    "linear_rhs", "make_initial_data", "nonlinear_terms", "p_symbol",
    "p_time_integral", "parse_config", "parse_config_text", "read_snapshot",
    "resonant_interval", "run_all_audits", "run_simulation", "step",
    "sym_transform", "threshold_scan", "velocity_from_streamfunction",
    "verify_prop_keylin", "weight_m", "weight_md", "weight_mnu", "weight_ms",
    "write_snapshot",
]
