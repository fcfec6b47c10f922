"""Acceptance criteria, one test per criterion.

Each test prints a single ``CRITERION n: PASS|FAIL`` line with capture
disabled, so the verdicts are visible in any pytest run.
"""
import numpy as np
import pytest

import shearmhd as sm
from shearmhd.audits import run_all_audits
from shearmhd.diagnostics import _sym_arrays, _weights_on_grid
from shearmhd.grid import Grid
from shearmhd.modes import ModeState, integrate_mode
from shearmhd.params import Frequency, Params
from shearmhd.runner import decay_rate_scan, growth_scan, run_simulation
from shearmhd.solver import MhdState, make_initial_data, step
from shearmhd.symbols import weight_by_ode, weight_md, weight_mnu, weight_ms


@pytest.fixture
def announce(capfd):
    def run(n, label, body):
        def emit(outcome):
            with capfd.disabled():
                print(f"CRITERION {n} ({label}): {outcome}", flush=True)
        try:
            body()
        except BaseException:
            emit("FAIL")
            raise
        emit("PASS")
    return run


def test_criterion_01_beta0_exact_current_growth(announce):
    def body():
        params = Params(nu=0.0, mu=0.0, beta=0.0, allow_out_of_theory=True)
        traj = integrate_mode(ModeState(0j, 1 + 0j, Frequency(1, 0.0)),
                              params, 50.0, tolerance=1e-10)
        exact = 1.0 + 50.0 ** 2
        assert abs(traj.j[-1] - exact) / exact < 1e-6
    announce(1, "field-free exact current growth", body)


def test_criterion_02_monotone_energy_functional(announce):
    def body():
        rng = np.random.default_rng(2024)
        cases = []
        for beta in (0.6, 1.0, 2.0):
            for nu in (1e-3, 1e-5):
                cases.append(Params(nu=nu, mu=nu, beta=beta))
        count = 0
        while count < 50:
            params = cases[count % len(cases)]
            k = int(rng.integers(1, 9)) * int(rng.choice([-1, 1]))
            eta = float(rng.uniform(-20.0, 20.0))
            om0 = complex(rng.normal(), rng.normal())
            j0 = complex(rng.normal(), rng.normal())
            t_end = 5.0 * params.nu ** (-1.0 / 3.0)
            traj = integrate_mode(ModeState(om0, j0, Frequency(k, eta)),
                                  params, t_end, tolerance=1e-8)
            d_int = np.concatenate(([0.0], np.cumsum(
                0.5 * (traj.d_sym[1:] + traj.d_sym[:-1]) * np.diff(traj.t))))
            lhs = traj.e_sym + d_int / 16.0
            assert np.all(lhs <= traj.e_sym[0] * (1.0 + 1e-3)), \
                f"violation at k={k}, eta={eta}, beta={params.beta}, nu={params.nu}"
            count += 1
    announce(2, "monotone symmetric energy, 50 random modes", body)


def test_criterion_03_inequality_audits(announce):
    def body():
        params = Params(nu=1e-4, mu=1e-4, beta=1.0)
        reports = run_all_audits(100000, params, rng_seed=0)
        assert len(reports) == 4
        for report in reports:
            assert report.passed, report.audit_name
            assert report.samples == 100000
    announce(3, "symbol inequality audits, 1e5 samples each", body)


def test_criterion_04_weights_vs_ode_oracle(announce):
    def body():
        rng = np.random.default_rng(4)
        closed = {"md": weight_md, "mnu": weight_mnu, "ms": weight_ms}
        worst = 0.0
        for _ in range(1000):
            k = int(rng.integers(1, 17)) * int(rng.choice([-1, 1]))
            eta = float(rng.uniform(-64.0, 64.0))
            t = float(rng.uniform(0.0, 100.0))
            nu = float(10.0 ** rng.uniform(-8.0, -1.0))
            p = Params(nu=nu, mu=nu, beta=1.0, allow_out_of_theory=True)
            which = ("md", "mnu", "ms")[int(rng.integers(0, 3))]
            exact = closed[which](k, eta, t, p)
            oracle = weight_by_ode(which, k, eta, t, p)
            worst = max(worst, abs(exact - oracle) / abs(oracle))
        assert worst < 1e-8, f"max relative error {worst:.3e}"
    announce(4, "closed-form weights vs ODE oracle, 1e3 tuples", body)


def test_criterion_05_transient_growth_scaling(announce):
    def body():
        base = Params(nu=1e-4, mu=1e-4, beta=2.0)
        result = growth_scan([1e-4, 1e-5, 1e-6], base)
        assert abs(result.slope - (-1.0 / 3.0)) < 0.1, \
            f"slope {result.slope:.4f}"
    announce(5, "transient growth slope -1/3 +- 0.1", body)


def test_criterion_06_enhanced_dissipation_scaling(announce):
    def body():
        base = Params(nu=1e-3, mu=1e-3, beta=2.0)
        result = decay_rate_scan([1e-3, 1e-4, 1e-5], base)
        assert abs(result.slope - (1.0 / 3.0)) < 0.1, f"slope {result.slope:.4f}"
        for nu, rate in zip(result.axis, result.responses):
            assert rate >= 0.01 * nu ** (1.0 / 3.0), \
                f"rate {rate:.3e} below floor at nu={nu:g}"
    announce(6, "enhanced dissipation slope +1/3 +- 0.1 and rate floor", body)


def _damping_constant(nx):
    params = Params(nu=1e-3, mu=1e-3, beta=1.0)
    eps = 1e-6
    # band 2 fits inside both dealiased grids, so the two resolutions start
    # from identical initial data
    cfg = sm.RunConfig(params=params, nx=nx, ny=nx, eps=eps, seed=7, band=2.0,
                       t_end=5.0 * 1e-3 ** (-1.0 / 3.0), ledger_stride=10,
                       run_id=f"damping-{nx}")
    ledger, _, _ = run_simulation(cfg)
    t = ledger.column("t")
    second = np.sqrt(ledger.column("u2_neq_l2") ** 2
                     + ledger.column("b2_neq_l2") ** 2)
    return float(np.max(np.sqrt(1.0 + t * t) * second / eps))


def test_criterion_07_inviscid_damping(announce):
    def body():
        c_lo = _damping_constant(64)
        c_hi = _damping_constant(128)
        assert np.isfinite(c_lo) and np.isfinite(c_hi)
        assert abs(c_hi - c_lo) / c_lo < 0.05, \
            f"fitted constants differ by {abs(c_hi - c_lo) / c_lo:.2%}"
    announce(7, "inviscid damping constant stable under refinement", body)


def test_criterion_08_nonlinear_solver_correctness(announce):
    def body():
        rng = np.random.default_rng(8)

        # (a) cancellation identity on 100 random pairs
        grid = Grid(48, 48)
        for trial in range(100):
            t = float(rng.uniform(0.0, 5.0))

            def draw(seed):
                g = np.random.default_rng(seed)
                f = (g.normal(size=(grid.nx, grid.ny))
                     + 1j * g.normal(size=(grid.nx, grid.ny)))
                f *= (np.abs(grid.kx) <= 6) & (np.abs(grid.eta) <= 6)
                f = grid.hermitianize(grid.dealias(f))
                f[0, 0] = 0.0
                return f

            f = draw(1000 + trial)
            g = draw(2000 + trial)
            ikx, iey = 1j * grid.kx, 1j * grid.eta
            ieyl = 1j * (grid.eta - grid.kx * t)
            static = (grid.to_physical(-iey * f) * grid.to_physical(ikx * g)
                      + grid.to_physical(ikx * f) * grid.to_physical(iey * g))
            moving = (grid.to_physical(-ieyl * f) * grid.to_physical(ikx * g)
                      + grid.to_physical(ikx * f) * grid.to_physical(ieyl * g))
            scale = np.max(np.abs(static)) + 1e-300
            assert np.max(np.abs(static - moving)) / scale < 1e-12

        # (b) fourth-order dt self-convergence
        grid_b = Grid(32, 32)
        params_b = Params(nu=1e-2, mu=1e-2, beta=1.0)

        def hermit(seed, scale):
            g = np.random.default_rng(seed)
            f = (g.normal(size=(grid_b.nx, grid_b.ny))
                 + 1j * g.normal(size=(grid_b.nx, grid_b.ny)))
            f *= (np.abs(grid_b.kx) <= 3) & (np.abs(grid_b.eta) <= 3)
            f = grid_b.hermitianize(grid_b.dealias(f)) * scale
            f[0, 0] = 0.0
            return f

        init = MhdState(hermit(9, 0.02), hermit(10, 0.02), 0.0)

        def advance(dt, n):
            s = init.copy()
            for _ in range(n):
                s = step(s, grid_b, params_b, dt)
            return s

        ref = advance(0.0125, 80)
        err = []
        for dt, n in ((0.1, 10), (0.05, 20), (0.025, 40)):
            s = advance(dt, n)
            err.append(np.sqrt(np.sum(np.abs(s.omega - ref.omega) ** 2)
                               + np.sum(np.abs(s.j - ref.j) ** 2)))
        for ratio in (err[0] / err[1], err[1] / err[2]):
            assert 13.0 < ratio < 19.0, f"convergence ratio {ratio:.2f}"

        # (c) Euler-limit enstrophy conservation at 256^2
        grid_c = Grid(256, 256)
        params_c = Params(nu=0.0, mu=0.0, beta=0.0, allow_out_of_theory=True)
        gC = np.random.default_rng(11)
        om = (gC.normal(size=(grid_c.nx, grid_c.ny))
              + 1j * gC.normal(size=(grid_c.nx, grid_c.ny)))
        om *= (np.abs(grid_c.kx) <= 3) & (np.abs(grid_c.eta) <= 3)
        om = grid_c.hermitianize(grid_c.dealias(om))
        om[0, 0] = 0.0
        om *= 0.5 / np.max(np.abs(grid_c.to_physical(om)))
        state = MhdState(om, grid_c.zeros(), 0.0)
        e0 = grid_c.l2_norm(state.omega)
        dt = 0.02
        for _ in range(500):
            state = step(state, grid_c, params_c, dt)
        drift = abs(grid_c.l2_norm(state.omega) - e0) / e0
        assert drift < 1e-6, f"enstrophy drift {drift:.3e}"

        # (d) vanishing-amplitude nonlinear run matches the per-mode linear
        # trajectory
        grid_d = Grid(32, 32)
        params_d = Params(nu=1e-3, mu=1e-3, beta=2.0)
        k, j_eta = 1, 4
        eta = float(grid_d.eta[0, j_eta])
        amp = 1e-10
        om = grid_d.zeros()
        om[k, j_eta] = amp
        om = grid_d.hermitianize(om) * 2.0
        s = MhdState(om, grid_d.zeros(), 0.0)
        dt = 0.004
        for _ in range(int(round(20.0 / dt))):
            s = step(s, grid_d, params_d, dt)
        traj = integrate_mode(ModeState(amp, 0j, Frequency(k, eta)),
                              params_d, 20.0, tolerance=1e-11)
        scale = abs(traj.omega[-1]) + abs(traj.j[-1])
        assert abs(s.omega[k, j_eta] - traj.omega[-1]) / scale < 1e-6
        assert abs(s.j[k, j_eta] - traj.j[-1]) / scale < 1e-6
    announce(8, "nonlinear solver correctness (cancellation, order, "
            "conservation, linear limit)", body)


def test_criterion_09_threshold_behavior(announce):
    def body():
        params = Params(nu=1e-3, mu=1e-3, beta=1.0)
        horizon = 10.0 * 1e-3 ** (-1.0 / 3.0)
        # low-frequency data including the k = 0 shear-flow modes: at eps = 10
        # this is an order-one perturbation of the background shear
        stable_cfg = sm.RunConfig(params=params, nx=128, ny=128,
                                  eps=0.1 * 1e-3 ** (2.0 / 3.0), seed=0,
                                  band=1.0, include_zero_modes=True,
                                  t_end=horizon, ledger_stride=10,
                                  run_id="threshold-stable")
        _, _, verdict = run_simulation(stable_cfg)
        assert verdict.stable, (
            f"small-data run flagged {verdict.violated_hypothesis} "
            f"at t={verdict.violation_time}")
        unstable_cfg = sm.RunConfig(params=params, nx=128, ny=128, eps=10.0,
                                    seed=0, band=1.0, include_zero_modes=True,
                                    t_end=horizon, ledger_stride=10,
                                    run_id="threshold-unstable")
        _, _, verdict = run_simulation(unstable_cfg)
        assert not verdict.stable, "large-data run not flagged unstable"
    announce(9, "bootstrap verdicts across the stability threshold", body)


def test_criterion_10_coercivity_band(announce):
    def body():
        params = Params(nu=1e-3, mu=1e-3, beta=1.0)
        grid = Grid(64, 64)
        state = make_initial_data(grid, params, 1e-4, seed=10)
        dt = 0.05
        inv = 1.0 / (2.0 * abs(params.beta))
        for i in range(120):
            state = step(state, grid, params, dt)
            if i % 5:
                continue
            z, q = _sym_arrays(grid, state)
            m, _, _ = _weights_on_grid(grid, state.time, params)
            base = grid.mode_weight * np.sum(np.abs(m * z) ** 2
                                             + np.abs(m * q) ** 2)
            e = sm.energy_sym_field(grid, state, params)
            assert 0.5 * (1 - inv) * base - 1e-12 * base <= e \
                <= 0.5 * (1 + inv) * base + 1e-12 * base
    announce(10, "symmetric energy coercivity band on every snapshot", body)
