"""Grid, nonlinear solver, and snapshot tests."""
import numpy as np
import pytest

from shearmhd.grid import Grid
from shearmhd.modes import ModeState, integrate_mode
from shearmhd.params import Frequency, Params
from shearmhd.snapshots import SnapshotError, read_snapshot, write_snapshot
from shearmhd.solver import (
    MhdState,
    invert_delta_L,
    make_initial_data,
    nonlinear_terms,
    step,
    velocity_from_streamfunction,
)


def free_params(nu=0.0, mu=0.0, beta=0.0, **kw):
    return Params(nu=nu, mu=mu, beta=beta, allow_out_of_theory=True, **kw)


def random_hermitian(grid, seed, band=None):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=(grid.nx, grid.ny)) + 1j * rng.normal(size=(grid.nx, grid.ny))
    if band is not None:
        f *= (np.abs(grid.kx) <= band) & (np.abs(grid.eta) <= band)
    f = grid.hermitianize(grid.dealias(f))
    f[0, 0] = 0.0
    return f


def test_grid_roundtrip_and_hermitian():
    grid = Grid(32, 32)
    f = random_hermitian(grid, 0)
    phys = grid.to_physical(f)
    back = grid.to_spectral(phys)
    assert np.max(np.abs(back - f)) < 1e-12
    assert grid.is_hermitian(f)


def test_plancherel_l2():
    # discrete norms use the fixed quadrature weight (2pi)^2 (2pi/Ly) per
    # mode; they are proportional to the physical-space integral by the
    # constant 4 pi^2 / Ly^2
    grid = Grid(32, 32)
    f = random_hermitian(grid, 1)
    phys = grid.to_physical(f)
    dx = 2 * np.pi / grid.nx
    dy = grid.ly / grid.ny
    quad = np.sum(phys ** 2) * dx * dy
    factor = 4.0 * np.pi ** 2 / grid.ly ** 2
    assert grid.l2_norm(f) ** 2 == pytest.approx(quad * factor, rel=1e-12)


def test_invert_delta_L():
    grid = Grid(32, 32)
    f = random_hermitian(grid, 2)
    t = 1.7
    psi = invert_delta_L(grid, f, t)
    # apply Delta_L = -p and recover
    back = -grid.p_array(t) * psi
    assert np.max(np.abs(back - f)) < 1e-12
    bad = f.copy()
    bad[0, 0] = 1.0
    with pytest.raises(ValueError):
        invert_delta_L(grid, bad, t)


def test_velocity_divergence_free():
    grid = Grid(32, 32)
    psi = random_hermitian(grid, 3)
    t = 2.3
    u1, u2 = velocity_from_streamfunction(grid, psi, t)
    div = 1j * grid.kx * u1 + 1j * (grid.eta - grid.kx * t) * u2
    assert np.max(np.abs(div)) < 1e-12


def test_cancellation_identity():
    # perp(grad_L F) . grad_L G == perp(grad F) . grad G for moving-frame fields
    grid = Grid(48, 48)
    rng = np.random.default_rng(4)
    for trial in range(100):
        t = float(rng.uniform(0, 5))
        f = random_hermitian(grid, 100 + trial, band=6)
        g = random_hermitian(grid, 200 + trial, band=6)
        ikx, iey = 1j * grid.kx, 1j * grid.eta
        ieyl = 1j * (grid.eta - grid.kx * t)
        static = (grid.to_physical(-iey * f) * grid.to_physical(ikx * g)
                  + grid.to_physical(ikx * f) * grid.to_physical(iey * g))
        moving = (grid.to_physical(-ieyl * f) * grid.to_physical(ikx * g)
                  + grid.to_physical(ikx * f) * grid.to_physical(ieyl * g))
        scale = np.max(np.abs(static)) + 1e-300
        assert np.max(np.abs(static - moving)) / scale < 1e-12


def test_single_mode_self_advection_vanishes():
    grid = Grid(32, 32)
    om = grid.zeros()
    om[1, 2] = 1.0 + 0.5j
    om = grid.hermitianize(om)
    state = MhdState(om, grid.zeros(), 0.7)
    nl_om, nl_j = nonlinear_terms(grid, state, free_params())
    assert np.max(np.abs(nl_om)) < 1e-14
    assert np.max(np.abs(nl_j)) < 1e-14


def test_nonlinear_mean_preservation():
    grid = Grid(48, 48)
    state = MhdState(random_hermitian(grid, 5, band=8),
                     random_hermitian(grid, 6, band=8), 1.1)
    nl_om, nl_j = nonlinear_terms(grid, state, free_params())
    assert nl_om[0, 0] == 0.0 and nl_j[0, 0] == 0.0


def test_step_zero_state_and_symmetry_preservation():
    grid = Grid(32, 32)
    params = Params(nu=1e-3, mu=1e-3, beta=1.0)
    zero = MhdState(grid.zeros(), grid.zeros(), 0.0)
    out = step(zero, grid, params, 0.1)
    assert np.all(out.omega == 0) and np.all(out.j == 0)

    state = MhdState(random_hermitian(grid, 7, band=4) * 1e-3,
                     random_hermitian(grid, 8, band=4) * 1e-3, 0.0)
    for _ in range(5):
        state = step(state, grid, params, 0.05)
    assert grid.is_hermitian(state.omega)
    assert np.all(state.omega[~grid.mask] == 0)
    assert state.omega[0, 0] == 0.0 and state.j[0, 0] == 0.0


def test_step_dt_self_convergence_fourth_order():
    grid = Grid(32, 32)
    params = Params(nu=1e-2, mu=1e-2, beta=1.0)
    init = MhdState(random_hermitian(grid, 9, band=3) * 0.02,
                    random_hermitian(grid, 10, band=3) * 0.02, 0.0)

    def advance(dt, n):
        s = init.copy()
        for _ in range(n):
            s = step(s, grid, params, dt)
        return s

    ref = advance(0.0125, 80)
    err = []
    for dt, n in ((0.1, 10), (0.05, 20), (0.025, 40)):
        s = advance(dt, n)
        err.append(np.sqrt(np.sum(np.abs(s.omega - ref.omega) ** 2)
                           + np.sum(np.abs(s.j - ref.j) ** 2)))
    r1 = err[0] / err[1]
    r2 = err[1] / err[2]
    assert 13.0 < r1 < 19.0
    assert 13.0 < r2 < 19.0


def test_linear_consistency_with_mode_integrator():
    # single tiny mode, nonlinear solver vs the per-mode linear trajectory
    grid = Grid(32, 32)
    params = Params(nu=1e-3, mu=1e-3, beta=2.0)
    k, eta = 1, 0.5
    j_eta = int(round(eta / grid.deta))
    amp = 1e-10
    om = grid.zeros()
    om[k, j_eta] = amp
    om = grid.hermitianize(om) * 2.0  # keep the (k, eta) coefficient = amp
    state = MhdState(om, grid.zeros(), 0.0)
    t_end, dt = 20.0, 0.004
    n = int(round(t_end / dt))
    for _ in range(n):
        state = step(state, grid, params, dt, nonlinear=True)
    traj = integrate_mode(ModeState(amp, 0j, Frequency(k, eta)), params,
                          t_end, tolerance=1e-11)
    got_om = state.omega[k, j_eta]
    got_j = state.j[k, j_eta]
    scale = abs(traj.omega[-1]) + abs(traj.j[-1])
    assert abs(got_om - traj.omega[-1]) / scale < 1e-6
    assert abs(got_j - traj.j[-1]) / scale < 1e-6


def test_enstrophy_conservation_euler_limit():
    # beta = 0, nu = mu = 0, j = 0: transport conserves the enstrophy
    grid = Grid(64, 64)
    params = free_params()
    om = random_hermitian(grid, 11, band=3)
    om *= 0.5 / np.max(np.abs(grid.to_physical(om)))
    state = MhdState(om, grid.zeros(), 0.0)
    e0 = grid.l2_norm(state.omega)
    dt = 0.02
    for _ in range(250):
        state = step(state, grid, params, dt)
    drift = abs(grid.l2_norm(state.omega) - e0) / e0
    assert drift < 1e-6


def test_make_initial_data_contract():
    grid = Grid(32, 32)
    params = Params(nu=1e-3, mu=1e-3, beta=1.0)
    a = make_initial_data(grid, params, 1e-3, seed=42)
    b = make_initial_data(grid, params, 1e-3, seed=42)
    assert np.array_equal(a.omega, b.omega) and np.array_equal(a.j, b.j)
    total = np.sqrt(grid.hn_norm_sq(a.omega, params.sobolev_n)
                    + grid.hn_norm_sq(a.j, params.sobolev_n))
    assert total == pytest.approx(1e-3, rel=1e-12)
    assert grid.is_hermitian(a.omega)
    zero = make_initial_data(grid, params, 0.0, seed=1)
    assert np.all(zero.omega == 0)


def test_snapshot_roundtrip_bit_identical(tmp_path):
    grid = Grid(32, 32)
    params = Params(nu=1e-3, mu=2e-3, beta=1.5)
    state = MhdState(random_hermitian(grid, 12), random_hermitian(grid, 13), 3.25)
    path = tmp_path / "s.bin"
    write_snapshot(path, grid, state, params)
    g2, s2, header = read_snapshot(path)
    assert (g2.nx, g2.ny, g2.ly) == (grid.nx, grid.ny, grid.ly)
    assert np.array_equal(s2.omega, state.omega)
    assert np.array_equal(s2.j, state.j)
    assert s2.time == state.time
    assert header["beta"] == 1.5

    path2 = tmp_path / "s2.bin"
    write_snapshot(path2, g2, s2, params)
    assert path.read_bytes() == path2.read_bytes()


def test_snapshot_rejects_garbage(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOPE!" + b"\x00" * 100)
    with pytest.raises(SnapshotError):
        read_snapshot(path)
    path.write_bytes(b"\x01")
    with pytest.raises(SnapshotError):
        read_snapshot(path)
