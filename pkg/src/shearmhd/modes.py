"""Per-mode integration of the linearized vorticity/current system.

Each Fourier mode (k, eta) evolves under a non-autonomous 2x2 complex system.
Stiff diffusion is removed exactly with the integrating factor
exp(-nu * int_0^t p) before the adaptive Runge-Kutta step, so the step size is
set by the O(beta k) coupling rates rather than nu * p.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import Frequency, Params
from .symbols import (
    WeightSet,
    dtt_p_symbol,
    evaluate_weights,
    japanese,
    p_time_integral,
    sobolev_bracket,
)


class StepFailure(RuntimeError):
    """The adaptive step collapsed below the minimum step size."""


class VerificationFailure(AssertionError):
    """A clause of the linear monotonicity check was violated."""

    def __init__(self, clause, time, detail=""):
        self.clause = clause
        self.time = time
        super().__init__(f"clause {clause} violated at t={time:.6g} {detail}")


@dataclass(frozen=True)
class ModeState:
    omega_hat: complex
    j_hat: complex
    frequency: Frequency
    time: float = 0.0


@dataclass(frozen=True)
class SymState:
    z: complex
    q: complex


def sym_transform(state: ModeState) -> SymState:
    """Map (Omega_hat, J_hat) to the symmetric pair via sqrt(k^2/p); zero for k=0."""
    k, eta = state.frequency
    if k == 0:
        return SymState(0j, 0j)
    p = k * k + (eta - k * state.time) ** 2
    r = abs(k) / math.sqrt(p)
    return SymState(r * state.omega_hat, r * state.j_hat)


def linear_rhs(state: ModeState, params: Params):
    """Right-hand side of the linearized per-mode system."""
    k, eta = state.frequency
    t = state.time
    if k == 0:
        # zero mode: pure diffusion
        return (-params.nu * eta * eta * state.omega_hat,
                -params.mu * eta * eta * state.j_hat)
    p = k * k + (eta - k * t) ** 2
    dtp = -2.0 * k * (eta - k * t)
    ib = params.beta * 1j * k
    d_omega = -params.nu * p * state.omega_hat + ib * state.j_hat
    d_j = (-params.mu * p * state.j_hat + (dtp / p) * state.j_hat
           + ib * state.omega_hat)
    return d_omega, d_j


@dataclass
class ModeTrajectory:
    """Sampled history of one mode; arrays share the time axis."""

    frequency: Frequency
    params: Params
    t: np.ndarray
    omega: np.ndarray
    j: np.ndarray
    z: np.ndarray
    q: np.ndarray
    m: np.ndarray
    m_d: np.ndarray
    m_nu: np.ndarray
    m_s: np.ndarray
    e_sym: np.ndarray
    d_sym: np.ndarray
    errors: np.ndarray = field(default=None)  # (n, 6) majorants L0..L5

    def __len__(self):
        return len(self.t)

    def state(self, i: int) -> ModeState:
        return ModeState(complex(self.omega[i]), complex(self.j[i]),
                         self.frequency, float(self.t[i]))


def energy_sym_pointwise(sym: SymState, weights: WeightSet, state: ModeState,
                         params: Params) -> float:
    k, eta = state.frequency
    if k == 0:
        raise ValueError("the symmetric energy is defined for k != 0 only")
    p = k * k + (eta - k * state.time) ** 2
    dtp = -2.0 * k * (eta - k * state.time)
    mz = weights.m * sym.z
    mq = weights.m * sym.q
    mixed = (dtp / (params.beta * 1j * k * p)) * mz * np.conj(mq)
    return 0.5 * (abs(mz) ** 2 + abs(mq) ** 2 - mixed.real)


def dissipation_sym_pointwise(sym: SymState, weights: WeightSet, state: ModeState,
                              params: Params) -> float:
    k, eta = state.frequency
    if k == 0:
        raise ValueError("the symmetric dissipation is defined for k != 0 only")
    p = k * k + (eta - k * state.time) ** 2
    mz2 = abs(weights.m * sym.z) ** 2
    mq2 = abs(weights.m * sym.q) ** 2
    return (params.nu * p * mz2 + params.mu * p * mq2
            + (weights.dt_mnu_ratio + weights.dt_md_ratio) * (mz2 + mq2))


def linear_error_terms(sym: SymState, weights: WeightSet, state: ModeState,
                       params: Params):
    """The six majorants bounding d/dt E_sym + D_sym along the linear flow."""
    k, eta = state.frequency
    if k == 0:
        raise ValueError("error terms are defined for k != 0 only")
    t = state.time
    p = k * k + (eta - k * t) ** 2
    dtp = -2.0 * k * (eta - k * t)
    dttp = dtt_p_symbol(k)
    ab = abs(params.beta)
    ak = abs(k)
    mz = abs(weights.m * sym.z)
    mq = abs(weights.m * sym.q)
    sq = mz * mz + mq * mq
    cross = mz * mq
    l0 = params.delta0 * params.nu_third * (1.0 + abs(dtp) / (ab * ak * p)) * sq
    l1 = (params.nu + params.mu) * abs(dtp) / (2.0 * ab * ak) * cross
    l2 = abs(dtp) / (ab * ak * p) * weights.dt_mnu_ratio * cross
    l3 = (p * abs(dttp) + dtp * dtp) / (2.0 * ab * ak * p * p) * cross
    l4 = abs(dtp) / (ab * ak * p) * weights.dt_md_ratio * cross
    l5 = abs(dtp) / (ab * ak * p) * weights.dt_ms_ratio * cross
    return l0, l1, l2, l3, l4, l5


# Dormand-Prince 5(4) tableau.
_DP_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_DP_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0),
)
_DP_B5 = _DP_A[6]
_DP_B4 = (5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0,
          -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0)
_EXP_CAP = 30.0  # bound on (mu - nu) * int p within one step


def _delta_p_integral(k, eta, t0, t1):
    return p_time_integral(k, eta, t1) - p_time_integral(k, eta, t0)


def integrate_mode(initial: ModeState, params: Params, t_end: float,
                   tolerance: float = 1e-8, max_samples: int = 200000) -> ModeTrajectory:
    """Adaptive trajectory of one mode on [t0, t_end].

    ``tolerance`` controls the local relative error per step.  Every accepted
    step is recorded as a sample, with weights, energy, dissipation and the
    error-term majorants evaluated alongside.
    """
    if t_end <= initial.time:
        raise ValueError("t_end must exceed the initial time")
    if tolerance <= 0.0:
        raise ValueError("tolerance must be positive")
    k, eta = initial.frequency
    nu, mu, beta = params.nu, params.mu, params.beta

    if k == 0:
        # pure diffusion, closed form on a uniform grid
        n = 201
        ts = np.linspace(initial.time, t_end, n)
        decay_o = np.exp(-nu * eta * eta * (ts - initial.time))
        decay_j = np.exp(-mu * eta * eta * (ts - initial.time))
        omega = initial.omega_hat * decay_o
        j = initial.j_hat * decay_j
        zero = np.zeros(n)
        mk = japanese(eta) ** params.sobolev_n * np.ones(n)
        return ModeTrajectory(
            frequency=initial.frequency, params=params, t=ts, omega=omega, j=j,
            z=zero.astype(complex), q=zero.astype(complex), m=mk,
            m_d=np.ones(n), m_nu=np.ones(n), m_s=np.ones(n),
            e_sym=zero, d_sym=zero, errors=np.zeros((n, 6)))

    ib = beta * 1j * k
    dmu = mu - nu

    def rhs(tau, a, b, t0, p0_int):
        dp = p_time_integral(k, eta, tau) - p0_int
        p = k * k + (eta - k * tau) ** 2
        dtp = -2.0 * k * (eta - k * tau)
        if dmu != 0.0:
            ea = math.exp(-dmu * dp)
            eb = math.exp(dmu * dp)
        else:
            ea = eb = 1.0
        return ib * ea * b, (dtp / p) * b + ib * eb * a

    t = initial.time
    y_o, y_j = complex(initial.omega_hat), complex(initial.j_hat)
    scale0 = max(abs(y_o), abs(y_j), 1e-30)
    atol = 1e-280 * scale0
    rtol = tolerance

    rate = abs(beta * k) + 1.0
    h = min(0.01 / rate, t_end - t)
    h_min = 1e-12 * max(1.0, t_end)

    ts, omegas, js = [t], [y_o], [y_j]

    while t < t_end:
        h = min(h, t_end - t)
        p0_int = p_time_integral(k, eta, t)
        if dmu > 0.0:
            dp_full = _delta_p_integral(k, eta, t, t + h)
            if dmu * dp_full > _EXP_CAP:
                h *= 0.9 * _EXP_CAP / (dmu * dp_full)
                dp_full = _delta_p_integral(k, eta, t, t + h)
        if h < h_min:
            raise StepFailure(f"step size collapsed at t={t:.6g} (k={k}, eta={eta})")

        ka = [0j] * 7
        kb = [0j] * 7
        ka[0], kb[0] = rhs(t, y_o, y_j, t, p0_int)
        for i in range(1, 7):
            aa = y_o
            bb = y_j
            row = _DP_A[i]
            for jj, c in enumerate(row):
                aa = aa + h * c * ka[jj]
                bb = bb + h * c * kb[jj]
            ka[i], kb[i] = rhs(t + _DP_C[i] * h, aa, bb, t, p0_int)

        a5 = y_o + h * sum(c * v for c, v in zip(_DP_B5, ka))
        b5 = y_j + h * sum(c * v for c, v in zip(_DP_B5, kb))
        a4 = y_o + h * sum(c * v for c, v in zip(_DP_B4, ka))
        b4 = y_j + h * sum(c * v for c, v in zip(_DP_B4, kb))

        sc_a = atol + rtol * max(abs(y_o), abs(a5))
        sc_b = atol + rtol * max(abs(y_j), abs(b5))
        err = math.sqrt(0.5 * ((abs(a5 - a4) / sc_a) ** 2
                               + (abs(b5 - b4) / sc_b) ** 2))

        if err <= 1.0:
            dp_full = _delta_p_integral(k, eta, t, t + h)
            t = t + h
            y_o = math.exp(-nu * dp_full) * a5
            y_j = math.exp(-mu * dp_full) * b5
            ts.append(t)
            omegas.append(y_o)
            js.append(y_j)
            if len(ts) > max_samples:
                raise StepFailure("sample budget exhausted; loosen the tolerance")
        factor = 0.9 * err ** -0.2 if err > 0.0 else 5.0
        h *= min(5.0, max(0.2, factor))

    ts = np.asarray(ts)
    omegas = np.asarray(omegas)
    js = np.asarray(js)
    p = k * k + (eta - k * ts) ** 2
    r = abs(k) / np.sqrt(p)
    z = r * omegas
    q = r * js

    n = len(ts)
    m = np.empty(n)
    m_d = np.empty(n)
    m_nu = np.empty(n)
    m_s = np.empty(n)
    e_sym = np.empty(n)
    d_sym = np.empty(n)
    errs = np.empty((n, 6))
    freq = initial.frequency
    check_errors = abs(beta) > 0.0
    for i in range(n):
        w = evaluate_weights(freq, float(ts[i]), params)
        m[i], m_d[i], m_nu[i], m_s[i] = w.m, w.m_d, w.m_nu, w.m_s
        st = ModeState(complex(omegas[i]), complex(js[i]), freq, float(ts[i]))
        sym = SymState(complex(z[i]), complex(q[i]))
        if check_errors:
            e_sym[i] = energy_sym_pointwise(sym, w, st, params)
            errs[i] = linear_error_terms(sym, w, st, params)
        else:
            e_sym[i] = 0.0
            errs[i] = 0.0
        d_sym[i] = dissipation_sym_pointwise(sym, w, st, params)

    return ModeTrajectory(
        frequency=freq, params=params, t=ts, omega=omegas, j=js, z=z, q=q,
        m=m, m_d=m_d, m_nu=m_nu, m_s=m_s, e_sym=e_sym, d_sym=d_sym, errors=errs)


@dataclass
class LinearVerdict:
    passed: bool
    energy_margin: float       # max of (E + I/16 - E0) / E0, <= tol when passing
    decay_constant_sym: float  # fitted C in the |Z|,|Q| decay bound
    decay_constant_oj: float   # fitted C in the <t>-weighted vorticity bound
    velocity_margin: float     # worst slack in the velocity symbol bounds


def verify_prop_keylin(trajectory: ModeTrajectory, params: Params,
                       tol: float = 1e-4) -> LinearVerdict:
    """Check the monotone-energy and decay conclusions along one trajectory.

    Raises :class:`VerificationFailure` naming the violated clause; fitted
    constants in the decay clauses are reported, not asserted.
    """
    if not abs(params.beta) > 0.5:
        raise ValueError("the monotone functional requires |beta| > 1/2")
    k, eta = trajectory.frequency
    if k == 0:
        raise ValueError("zero modes bypass the symmetric-variable machinery")
    ts = trajectory.t
    e = trajectory.e_sym
    d_int = np.concatenate(
        ([0.0], np.cumsum(0.5 * (trajectory.d_sym[1:] + trajectory.d_sym[:-1])
                          * np.diff(ts))))

    e0 = e[0]
    if e0 > 0.0:
        lhs = e + d_int / 16.0
        margin = float(np.max((lhs - e0) / e0))
        if margin > tol:
            i = int(np.argmax((lhs - e0) / e0))
            raise VerificationFailure("a:monotone-energy", float(ts[i]),
                                      f"margin={margin:.3e}")
    else:
        margin = 0.0

    decay = np.exp(-params.delta0 * params.nu_third * (ts - ts[0]))
    amp_zq0 = abs(trajectory.z[0]) + abs(trajectory.q[0])
    if amp_zq0 > 0.0:
        c_sym = float(np.max(np.maximum(np.abs(trajectory.z), np.abs(trajectory.q))
                             / (decay * amp_zq0)))
        if not np.isfinite(c_sym):
            raise VerificationFailure("b:sym-decay", float(ts[-1]), "non-finite fit")
    else:
        c_sym = 0.0

    amp_oj0 = abs(trajectory.omega[0]) + abs(trajectory.j[0])
    if amp_oj0 > 0.0:
        env = japanese(ts) * decay * amp_oj0
        c_oj = float(np.max(np.maximum(np.abs(trajectory.omega),
                                       np.abs(trajectory.j)) / env))
        if not np.isfinite(c_oj):
            raise VerificationFailure("c:oj-decay", float(ts[-1]), "non-finite fit")
    else:
        c_oj = 0.0

    # velocity symbol bounds: |U1| <= |Z| and <t>|U2| <= <|k,eta|>|Z|
    p = k * k + (eta - k * ts) ** 2
    u1 = np.abs(eta - k * ts) / p * np.abs(trajectory.omega)
    u2 = np.abs(k) / p * np.abs(trajectory.omega)
    zabs = np.abs(trajectory.z)
    slack1 = zabs - u1
    slack2 = sobolev_bracket(k, eta) * zabs - japanese(ts) * u2
    worst = float(min(slack1.min(initial=0.0), slack2.min(initial=0.0)))
    tiny = 1e-9 * (zabs.max(initial=0.0) + 1e-300)
    if worst < -tiny:
        i = int(np.argmin(np.minimum(slack1, slack2)))
        raise VerificationFailure("d:velocity-bounds", float(ts[i]),
                                  f"slack={worst:.3e}")

    return LinearVerdict(True, margin, c_sym, c_oj, worst)
