"""Fourier symbols of the sheared Laplacian and the multiplier weights.

All functions accept scalars or numpy arrays for ``k``, ``eta`` and ``t``
(broadcasting applies).  The weights are evaluated in closed form; the ODE
route is kept only as a cross-check, see :func:`weight_by_ode`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import Frequency, Params


def p_symbol(k, eta, t):
    """Symbol of minus the moving-frame Laplacian: k^2 + (eta - k t)^2."""
    return k * k + (eta - k * t) ** 2


def dt_p_symbol(k, eta, t):
    """Time derivative of p: -2 k (eta - k t)."""
    return -2.0 * k * (eta - k * t)


def dtt_p_symbol(k):
    """Second time derivative of p: 2 k^2."""
    return 2.0 * k * k


def p_time_integral(k, eta, t):
    """Integral of p over [0, t], exact for each mode.

    For k != 0 this is k^2 t + (eta^3 - (eta - k t)^3) / (3k); for k = 0 it
    degenerates to eta^2 t.
    """
    k = np.asarray(k, dtype=float)
    eta = np.asarray(eta, dtype=float)
    ksafe = np.where(k == 0.0, 1.0, k)
    shear = (eta**3 - (eta - k * t) ** 3) / (3.0 * ksafe)
    out = k * k * t + np.where(k == 0.0, eta * eta * t, shear)
    return out if out.ndim else float(out)


def sobolev_bracket(k, eta):
    """<|k, eta|> with the |a,b| = |a| + |b| convention."""
    return np.sqrt(1.0 + (np.abs(k) + np.abs(eta)) ** 2)


def japanese(a):
    """<a> = sqrt(1 + a^2)."""
    return np.sqrt(1.0 + np.asarray(a, dtype=float) ** 2)


# ---------------------------------------------------------------------------
# Weights.  Each one solves dm/dt = r(t) m, m(0) = 1, with r given below; the
# closed forms integrate r exactly.

def weight_md(k, eta, t, params: Params):
    """Inviscid-damping weight: rate C_beta / (1 + (eta/k - t)^2)."""
    k = np.asarray(k, dtype=float)
    ksafe = np.where(k == 0.0, 1.0, k)
    a = np.asarray(eta, dtype=float) / ksafe
    val = np.exp(params.c_beta * (np.arctan(a) - np.arctan(a - t)))
    out = np.where(k == 0.0, 1.0, val)
    return out if out.ndim else float(out)


def dt_weight_md_ratio(k, eta, t, params: Params):
    k = np.asarray(k, dtype=float)
    ksafe = np.where(k == 0.0, 1.0, k)
    a = np.asarray(eta, dtype=float) / ksafe
    out = np.where(k == 0.0, 0.0, params.c_beta / (1.0 + (a - t) ** 2))
    return out if out.ndim else float(out)


def weight_mnu(k, eta, t, params: Params):
    """Enhanced-dissipation weight: rate nu^{1/3} / (1 + nu^{2/3}(eta/k - t)^2)."""
    if params.nu == 0.0:
        out = np.ones_like(np.asarray(k, dtype=float) * np.asarray(eta, dtype=float) * t)
        return out if out.ndim else 1.0
    lam = params.nu_third
    k = np.asarray(k, dtype=float)
    ksafe = np.where(k == 0.0, 1.0, k)
    a = np.asarray(eta, dtype=float) / ksafe
    val = np.exp(np.arctan(lam * a) - np.arctan(lam * (a - t)))
    out = np.where(k == 0.0, 1.0, val)
    return out if out.ndim else float(out)


def dt_weight_mnu_ratio(k, eta, t, params: Params):
    if params.nu == 0.0:
        out = np.zeros_like(np.asarray(k, dtype=float) * np.asarray(eta, dtype=float) * t)
        return out if out.ndim else 0.0
    lam = params.nu_third
    k = np.asarray(k, dtype=float)
    ksafe = np.where(k == 0.0, 1.0, k)
    a = np.asarray(eta, dtype=float) / ksafe
    out = np.where(k == 0.0, 0.0, lam / (1.0 + lam * lam * (a - t) ** 2))
    return out if out.ndim else float(out)


def weight_ms(k, eta, t, params: Params):
    """Mixed-product weight: rate gamma_beta C_beta / (1 + (eta/k - t)^2)^{3/2}.

    The antiderivative of the rate in u = eta/k - t is u / sqrt(1 + u^2).
    """
    g = params.gamma_beta * params.c_beta
    k = np.asarray(k, dtype=float)
    ksafe = np.where(k == 0.0, 1.0, k)
    a = np.asarray(eta, dtype=float) / ksafe
    u0 = a
    u1 = a - t
    val = np.exp(g * (u0 / np.sqrt(1.0 + u0 * u0) - u1 / np.sqrt(1.0 + u1 * u1)))
    out = np.where(k == 0.0, 1.0, val)
    return out if out.ndim else float(out)


def dt_weight_ms_ratio(k, eta, t, params: Params):
    g = params.gamma_beta * params.c_beta
    k = np.asarray(k, dtype=float)
    ksafe = np.where(k == 0.0, 1.0, k)
    a = np.asarray(eta, dtype=float) / ksafe
    out = np.where(k == 0.0, 0.0, g / (1.0 + (a - t) ** 2) ** 1.5)
    return out if out.ndim else float(out)


def weight_m(k, eta, t, params: Params):
    """Composite Sobolev weight.

    k != 0: e^{delta0 nu^{1/3} t} <|k,eta|>^N / (m^d m^nu m^s); k = 0: <eta>^N.
    """
    k_arr = np.asarray(k, dtype=float)
    grow = np.exp(params.delta0 * params.nu_third * t)
    bracket = sobolev_bracket(k_arr, eta) ** params.sobolev_n
    prod = weight_md(k, eta, t, params) * weight_mnu(k, eta, t, params) \
        * weight_ms(k, eta, t, params)
    zero_val = japanese(eta) ** params.sobolev_n
    out = np.where(k_arr == 0.0, zero_val, grow * bracket / np.asarray(prod))
    return out if out.ndim else float(out)


def dt_weight_m_ratio(k, eta, t, params: Params):
    """Logarithmic derivative of the composite weight, zero for k = 0."""
    k_arr = np.asarray(k, dtype=float)
    s = dt_weight_md_ratio(k, eta, t, params) \
        + dt_weight_mnu_ratio(k, eta, t, params) \
        + dt_weight_ms_ratio(k, eta, t, params)
    out = np.where(k_arr == 0.0, 0.0, params.delta0 * params.nu_third - np.asarray(s))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class WeightSet:
    """All multipliers evaluated at one (k, eta, t)."""

    m_d: float
    m_nu: float
    m_s: float
    m: float
    dt_md_ratio: float
    dt_mnu_ratio: float
    dt_ms_ratio: float


def evaluate_weights(freq: Frequency, t: float, params: Params) -> WeightSet:
    k, eta = freq
    return WeightSet(
        m_d=float(weight_md(k, eta, t, params)),
        m_nu=float(weight_mnu(k, eta, t, params)),
        m_s=float(weight_ms(k, eta, t, params)),
        m=float(weight_m(k, eta, t, params)),
        dt_md_ratio=float(dt_weight_md_ratio(k, eta, t, params)),
        dt_mnu_ratio=float(dt_weight_mnu_ratio(k, eta, t, params)),
        dt_ms_ratio=float(dt_weight_ms_ratio(k, eta, t, params)),
    )


def resonant_interval(freq: Frequency, t: float) -> bool:
    """True iff t lies in the resonant interval |t - eta/k| <= |eta| / (2 k^2)."""
    k, eta = freq
    if k == 0:
        raise ValueError("resonant intervals are defined for k != 0 only")
    return abs(t - eta / k) <= abs(eta) / (2.0 * k * k)


def weight_by_ode(which: str, k: int, eta: float, t: float, params: Params,
                  rtol: float = 1e-12) -> float:
    """Integrate the defining weight ODE with an adaptive solver.

    Slow reference path used to cross-check the closed forms; ``which`` is one
    of ``"md"``, ``"mnu"``, ``"ms"``.
    """
    from scipy.integrate import solve_ivp

    if k == 0:
        return 1.0
    rate = {
        "md": dt_weight_md_ratio,
        "mnu": dt_weight_mnu_ratio,
        "ms": dt_weight_ms_ratio,
    }[which]

    def rhs(tau, y):
        return [rate(k, eta, tau, params) * y[0]]

    sol = solve_ivp(rhs, (0.0, t), [1.0], method="DOP853", rtol=rtol, atol=1e-14)
    if not sol.success:
        raise RuntimeError(f"weight ODE integration failed: {sol.message}")
    return float(sol.y[0, -1])
