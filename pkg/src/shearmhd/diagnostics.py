"""Energy bookkeeping over solver snapshots and the bootstrap monitor."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .grid import Grid
from .params import Params
from .solver import MhdState, extract_zero_modes, invert_delta_L, \
    velocity_from_streamfunction
from .symbols import (
    dt_weight_md_ratio,
    dt_weight_mnu_ratio,
    weight_m,
)

LEDGER_COLUMNS = [
    "t", "e_sym", "e_ho", "e_0", "d_sym", "d_ho", "d_0",
    "g_nu_z", "g_d_z", "g_nu_q", "g_d_q",
    "hn_omega_neq", "hn_j_neq",
    "u2_neq_l2", "b2_neq_l2", "u1_neq_l2", "b1_neq_l2",
    "h_sym_ok", "h_ho_ok", "h_0_ok",
]


def _weights_on_grid(grid: Grid, t: float, params: Params):
    m = weight_m(grid.kx, grid.eta, t, params)
    r_nu = dt_weight_mnu_ratio(grid.kx, grid.eta, t, params)
    r_d = dt_weight_md_ratio(grid.kx, grid.eta, t, params)
    return m, r_nu, r_d


def _sym_arrays(grid: Grid, state: MhdState):
    """Z and Q arrays (zero on the k = 0 column)."""
    p = grid.p_array(state.time)
    p_safe = np.where(p == 0.0, 1.0, p)
    r = np.where(grid.kx == 0, 0.0, np.abs(grid.kx) / np.sqrt(p_safe))
    return r * state.omega, r * state.j


def energy_sym_field(grid: Grid, state: MhdState, params: Params) -> float:
    """Plancherel sum of the pointwise symmetric-energy integrand over k != 0."""
    z, q = _sym_arrays(grid, state)
    m, _, _ = _weights_on_grid(grid, state.time, params)
    p = grid.p_array(state.time)
    p_safe = np.where(p == 0.0, 1.0, p)
    dtp = grid.dtp_array(state.time)
    ksafe = np.where(grid.kx == 0, 1, grid.kx)
    mz = m * z
    mq = m * q
    mixed = (dtp / (params.beta * 1j * ksafe * p_safe)) * mz * np.conj(mq)
    integrand = 0.5 * (np.abs(mz) ** 2 + np.abs(mq) ** 2 - mixed.real)
    integrand = np.where(grid.kx == 0, 0.0, integrand)
    return float(grid.mode_weight * np.sum(integrand))


def energy_ho_field(grid: Grid, state: MhdState, params: Params) -> float:
    m, _, _ = _weights_on_grid(grid, state.time, params)
    return float(0.5 * grid.mode_weight
                 * np.sum(np.abs(m * state.omega) ** 2 + np.abs(m * state.j) ** 2))


def energy_zero_field(grid: Grid, state: MhdState, params: Params,
                      t: float = None) -> float:
    if t is None:
        t = state.time
    u01, b01, om0, j0 = extract_zero_modes(grid, state)
    eta = grid.eta[0, :]
    w = (1.0 + eta * eta) ** params.sobolev_n
    s = grid.mode_weight * np.sum(
        w * (np.abs(u01) ** 2 + np.abs(b01) ** 2
             + (np.abs(om0) ** 2 + np.abs(j0) ** 2) / (1.0 + t * t)))
    return float(0.5 * s)


def good_terms(grid: Grid, state: MhdState, params: Params):
    """G_nu and G_d for both symmetric variables."""
    z, q = _sym_arrays(grid, state)
    m, r_nu, r_d = _weights_on_grid(grid, state.time, params)
    w = grid.mode_weight

    def g(r, f):
        return float(w * np.sum(r * np.abs(m * f) ** 2))

    return g(r_nu, z), g(r_d, z), g(r_nu, q), g(r_d, q)


def dissipation_fields(grid: Grid, state: MhdState, params: Params,
                       t: float = None):
    """(D_sym, D_ho, D_0) evaluated spectrally."""
    if t is None:
        t = state.time
    z, q = _sym_arrays(grid, state)
    m, r_nu, r_d = _weights_on_grid(grid, t, params)
    p = grid.p_array(t)
    w = grid.mode_weight

    def diss(f_z, f_q):
        mz2 = np.abs(m * f_z) ** 2
        mq2 = np.abs(m * f_q) ** 2
        return float(w * np.sum(params.nu * p * mz2 + params.mu * p * mq2
                                + (r_nu + r_d) * (mz2 + mq2)))

    d_sym = diss(z, q)
    d_ho = diss(state.omega, state.j)

    u01, b01, om0, j0 = extract_zero_modes(grid, state)
    eta = grid.eta[0, :]
    wn = (1.0 + eta * eta) ** params.sobolev_n
    d_0 = float(w * np.sum(wn * eta * eta * (
        params.nu * np.abs(u01) ** 2 + params.mu * np.abs(b01) ** 2
        + (params.nu * np.abs(om0) ** 2 + params.mu * np.abs(j0) ** 2)
        / (1.0 + t * t))))
    return d_sym, d_ho, d_0


def velocity_norms(grid: Grid, state: MhdState):
    """L2 norms of the nonzero-frequency velocity and magnetic components."""
    t = state.time
    out = {}
    for name, f in (("u", state.omega), ("b", state.j)):
        pot = invert_delta_L(grid, f, t)
        v1, v2 = velocity_from_streamfunction(grid, pot, t)
        nz = grid.kx != 0
        out[f"{name}1_neq_l2"] = float(np.sqrt(
            grid.mode_weight * np.sum(np.abs(np.where(nz, v1, 0.0)) ** 2)))
        out[f"{name}2_neq_l2"] = float(np.sqrt(
            grid.mode_weight * np.sum(np.abs(np.where(nz, v2, 0.0)) ** 2)))
    return out


def damping_ratios(grid: Grid, state: MhdState, initial_size: float = 1.0):
    """Inviscid-damping diagnostic: <t> ||(u2, b2)_neq|| / initial size."""
    t = state.time
    norms = velocity_norms(grid, state)
    second = np.sqrt(norms["u2_neq_l2"] ** 2 + norms["b2_neq_l2"] ** 2)
    first = np.sqrt(norms["u1_neq_l2"] ** 2 + norms["b1_neq_l2"] ** 2)
    scale = initial_size if initial_size > 0.0 else 1.0
    return {
        "t": t,
        "damping_ratio": float(np.sqrt(1.0 + t * t) * second / scale),
        "first_component_ratio": float(first / scale),
        **norms,
    }


def hn_neq_norms(grid: Grid, state: MhdState, params: Params):
    nz = grid.kx != 0
    om = np.where(nz, state.omega, 0.0)
    jj = np.where(nz, state.j, 0.0)
    return (grid.hn_norm(om, params.sobolev_n), grid.hn_norm(jj, params.sobolev_n))


@dataclass
class EnergyLedger:
    """Time series of the energy/dissipation functionals for one run."""

    rows: list = field(default_factory=list)

    def append(self, row: dict):
        if self.rows and row["t"] <= self.rows[-1]["t"]:
            raise ValueError("ledger times must be strictly increasing")
        self.rows.append(row)

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        return np.array([r[name] for r in self.rows])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(LEDGER_COLUMNS)
            for r in self.rows:
                writer.writerow([repr(r.get(c, "")) if isinstance(r.get(c), float)
                                 else r.get(c, "") for c in LEDGER_COLUMNS])

    @staticmethod
    def from_csv(path):
        ledger = EnergyLedger()
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for rec in reader:
                row = {}
                for key, val in rec.items():
                    if val == "":
                        continue
                    row[key] = float(val) if key not in ("h_sym_ok", "h_ho_ok", "h_0_ok") \
                        else val in ("True", "1")
                ledger.rows.append(row)
        return ledger


def ledger_row(grid: Grid, state: MhdState, params: Params) -> dict:
    """Evaluate every ledger column for one snapshot (bootstrap flags unset)."""
    g_nu_z, g_d_z, g_nu_q, g_d_q = good_terms(grid, state, params)
    d_sym, d_ho, d_0 = dissipation_fields(grid, state, params)
    hn_om, hn_j = hn_neq_norms(grid, state, params)
    vn = velocity_norms(grid, state)
    return {
        "t": state.time,
        "e_sym": energy_sym_field(grid, state, params),
        "e_ho": energy_ho_field(grid, state, params),
        "e_0": energy_zero_field(grid, state, params),
        "d_sym": d_sym, "d_ho": d_ho, "d_0": d_0,
        "g_nu_z": g_nu_z, "g_d_z": g_d_z, "g_nu_q": g_nu_q, "g_d_q": g_d_q,
        "hn_omega_neq": hn_om, "hn_j_neq": hn_j,
        **vn,
    }


BOOTSTRAP_C1 = 4000.0


@dataclass
class BootstrapVerdict:
    stable: bool
    violation_time: float = None
    violated_hypothesis: str = None

    def to_json(self, run_id="run"):
        return json.dumps({
            "run_id": run_id,
            "verdict": "stable" if self.stable else "unstable",
            "violation_time": self.violation_time,
            "violated_hypothesis": self.violated_hypothesis,
        })


def bootstrap_monitor(ledger: EnergyLedger, params: Params,
                      eps: float) -> BootstrapVerdict:
    """Check the three bootstrap envelopes; returns the first violation, if any.

    H_sym: E_sym + (1/16) int D_sym <= 10 eps^2
    H_ho:  E_ho + (1/16) int D_ho <= 4000 eps^2 <t>^2
    H_0:   E_0 + (1/16) int D_0 <= 100 eps^2
    """
    if not len(ledger):
        raise ValueError("empty ledger")
    t = ledger.column("t")
    eps2 = eps * eps

    def cum(name):
        d = ledger.column(name)
        return np.concatenate(([0.0], np.cumsum(0.5 * (d[1:] + d[:-1]) * np.diff(t))))

    checks = [
        ("H_sym", ledger.column("e_sym") + cum("d_sym") / 16.0,
         10.0 * eps2 * np.ones_like(t)),
        ("H_ho", ledger.column("e_ho") + cum("d_ho") / 16.0,
         BOOTSTRAP_C1 * eps2 * (1.0 + t * t)),
        ("H_0", ledger.column("e_0") + cum("d_0") / 16.0,
         100.0 * eps2 * np.ones_like(t)),
    ]
    first_t, first_name = None, None
    for name, lhs, rhs in checks:
        bad = np.nonzero(lhs > rhs)[0]
        if len(bad):
            tv = float(t[bad[0]])
            if first_t is None or tv < first_t:
                first_t, first_name = tv, name
    for row, tv in zip(ledger.rows, t):
        row["h_sym_ok"] = first_name != "H_sym" or tv < first_t
        row["h_ho_ok"] = first_name != "H_ho" or tv < first_t
        row["h_0_ok"] = first_name != "H_0" or tv < first_t
    if first_t is None:
        return BootstrapVerdict(True)
    return BootstrapVerdict(False, first_t, first_name)
