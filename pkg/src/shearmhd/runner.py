"""Run orchestration, persistence, and the three scaling experiments."""
from __future__ import annotations

import dataclasses
import json
import os
import time as _time
from dataclasses import dataclass, replace

import numpy as np

from .config import RunConfig
from .diagnostics import BootstrapVerdict, EnergyLedger, bootstrap_monitor, ledger_row
from .modes import ModeState, integrate_mode
from .params import Frequency, Params
from .snapshots import write_snapshot
from .solver import BlowupDetected, make_initial_data, step, suggested_dt


class FitFailure(RuntimeError):
    """Scan responses unsuitable for a log-log slope fit."""


class BisectFailure(RuntimeError):
    """Bisection endpoints did not bracket the stability boundary."""

    def __init__(self, nu, lo, hi, lo_verdict, hi_verdict):
        self.nu = nu
        self.endpoints = (lo, hi)
        super().__init__(
            f"nu={nu:g}: eps={lo:g} gave {lo_verdict}, eps={hi:g} gave "
            f"{hi_verdict}; expected stable/unstable bracket")


@dataclass
class ScanResult:
    axis: list
    responses: list
    slope: float = None
    slope_ci: float = None
    details: dict = dataclasses.field(default_factory=dict)


def _loglog_slope(x, y):
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    coeffs, cov = np.polyfit(lx, ly, 1, cov=True)
    return float(coeffs[0]), float(2.0 * np.sqrt(cov[0, 0]))


def run_simulation(config: RunConfig, out_dir=None):
    """Advance one configured run; returns (ledger, final state, verdict).

    Deterministic for a fixed config. A tripped blowup ceiling is recorded as
    an unstable verdict, not raised.
    """
    grid = config.make_grid()
    params = config.params
    state = make_initial_data(grid, params, config.eps, config.seed,
                              band=config.band,
                              include_zero_modes=config.include_zero_modes)
    dt = config.dt if config.dt > 0.0 else suggested_dt(grid, params, state)
    n_steps = max(1, int(np.ceil(config.t_end / dt)))
    dt = config.t_end / n_steps
    ceiling = config.blowup_factor * config.eps if config.eps > 0.0 else None

    wall_start = _time.perf_counter()
    ledger = EnergyLedger()
    ledger.append(ledger_row(grid, state, params))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_snapshot(os.path.join(out_dir, "snapshot_initial.bin"),
                       grid, state, params)

    blowup = None
    for i in range(1, n_steps + 1):
        try:
            state = step(state, grid, params, dt, nonlinear=config.nonlinear,
                         blowup_norm=ceiling)
        except BlowupDetected as exc:
            blowup = exc
            break
        if i % config.ledger_stride == 0 or i == n_steps:
            ledger.append(ledger_row(grid, state, params))
        if (out_dir is not None and config.snapshot_stride > 0
                and i % config.snapshot_stride == 0):
            write_snapshot(os.path.join(out_dir, f"snapshot_{i:08d}.bin"),
                           grid, state, params)

    if config.eps > 0.0:
        verdict = bootstrap_monitor(ledger, params, config.eps)
    else:
        verdict = BootstrapVerdict(True)
    if blowup is not None:
        verdict = BootstrapVerdict(False, blowup.time, "blowup")
    wall = _time.perf_counter() - wall_start

    if out_dir is not None:
        ledger.to_csv(os.path.join(out_dir, "ledger.csv"))
        with open(os.path.join(out_dir, "verdict.jsonl"), "w") as fh:
            fh.write(verdict.to_json(config.run_id) + "\n")
        write_snapshot(os.path.join(out_dir, "snapshot_final.bin"),
                       grid, state, params)
        from . import __version__
        manifest = {"config": config.echo(), "version": __version__,
                    "wall_time_s": wall}
        with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
            json.dump(manifest, fh, indent=2)
    return ledger, state, verdict


def _scaled_params(base: Params, nu: float) -> Params:
    """Replace nu, keeping the magnetic Prandtl number of the base."""
    ratio = base.mu / base.nu if base.nu > 0.0 else 1.0
    return replace(base, nu=nu, mu=nu * ratio)


def _joint_amplitude(traj):
    return np.sqrt(np.abs(traj.omega) ** 2 + np.abs(traj.j) ** 2)


def growth_scan(nu_list, base_params: Params,
                frequency: Frequency = Frequency(1, 0.0),
                t_end_factor: float = 10.0,
                tolerance: float = 1e-8) -> ScanResult:
    """Transient-growth amplitudes A(nu) for one linearized mode, with the
    fitted log-log slope (expected near -1/3)."""
    if len(nu_list) < 3:
        raise FitFailure("need at least 3 viscosities for a slope fit")
    amps = []
    for nu in nu_list:
        params = _scaled_params(base_params, nu)
        t_end = t_end_factor * params.nu ** (-1.0 / 3.0)
        traj = integrate_mode(ModeState(1.0 + 0j, 0j, frequency), params,
                              t_end, tolerance=tolerance)
        amp = _joint_amplitude(traj)
        amps.append(float(np.max(amp) / amp[0]))
    order = np.argsort(nu_list)
    sorted_amps = np.asarray(amps)[order]
    if np.any(np.diff(sorted_amps) > 0.05 * sorted_amps[:-1]):
        raise FitFailure(f"amplitudes not decreasing in nu: {amps}")
    slope, ci = _loglog_slope(nu_list, amps)
    return ScanResult(axis=list(nu_list), responses=amps, slope=slope,
                      slope_ci=ci, details={"frequency": tuple(frequency)})


def decay_rate_scan(nu_list, base_params: Params,
                    frequency: Frequency = Frequency(1, 0.0),
                    window=(2.0, 8.0),
                    tolerance: float = 1e-8) -> ScanResult:
    """Enhanced-dissipation rates r(nu) fitted on t in window * nu^{-1/3},
    with the fitted log-log slope (expected near +1/3)."""
    if len(nu_list) < 3:
        raise FitFailure("need at least 3 viscosities for a slope fit")
    rates = []
    for nu in nu_list:
        params = _scaled_params(base_params, nu)
        scale = params.nu ** (-1.0 / 3.0)
        traj = integrate_mode(ModeState(1.0 + 0j, 0j, frequency), params,
                              window[1] * scale, tolerance=tolerance)
        amp = _joint_amplitude(traj)
        sel = (traj.t >= window[0] * scale) & (amp > 0.0)
        if sel.sum() < 3:
            raise FitFailure(f"nu={nu:g}: too few samples in the fit window")
        coeffs = np.polyfit(traj.t[sel], np.log(amp[sel]), 1)
        rate = -float(coeffs[0])
        if rate <= 0.0:
            raise FitFailure(f"nu={nu:g}: fitted rate {rate:g} not positive")
        rates.append(rate)
    slope, ci = _loglog_slope(nu_list, rates)
    return ScanResult(axis=list(nu_list), responses=rates, slope=slope,
                      slope_ci=ci, details={"frequency": tuple(frequency),
                                            "window": tuple(window)})


def _verdict_of(config: RunConfig) -> bool:
    _, _, verdict = run_simulation(config)
    return verdict.stable


def threshold_scan(nu_list, base_config: RunConfig,
                   eps_lo=None, eps_hi: float = 10.0,
                   iterations: int = 10) -> ScanResult:
    """Bisect the initial size on the bootstrap verdict for each viscosity.

    eps_lo defaults to 0.1 nu^{2/3} (a provably stable scale); near-threshold
    verdict non-monotonicity surfaces as BisectFailure at the endpoints.
    """
    stars = []
    verdicts = {}
    for nu in nu_list:
        params = _scaled_params(base_config.params, nu)
        lo = eps_lo if eps_lo is not None else 0.1 * nu ** (2.0 / 3.0)
        hi = eps_hi
        cfg_lo = replace(base_config, params=params, eps=lo, t_end=-1.0)
        cfg_hi = replace(base_config, params=params, eps=hi, t_end=-1.0)
        lo_stable = _verdict_of(cfg_lo)
        hi_stable = _verdict_of(cfg_hi)
        verdicts[nu] = {"lo": (lo, lo_stable), "hi": (hi, hi_stable)}
        if not lo_stable or hi_stable:
            raise BisectFailure(nu, lo, hi,
                                "stable" if lo_stable else "unstable",
                                "stable" if hi_stable else "unstable")
        for _ in range(iterations):
            mid = float(np.sqrt(lo * hi))
            cfg = replace(base_config, params=params, eps=mid, t_end=-1.0)
            if _verdict_of(cfg):
                lo = mid
            else:
                hi = mid
        stars.append(float(np.sqrt(lo * hi)))
    slope = ci = None
    if len(nu_list) >= 3:
        slope, ci = _loglog_slope(nu_list, stars)
    return ScanResult(axis=list(nu_list), responses=stars, slope=slope,
                      slope_ci=ci, details={"endpoint_verdicts": verdicts})
