"""Command-line harness.

Exit codes: 0 on success, 2 when an audit or verification fails, 1 on usage
or configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from .audits import run_all_audits, write_reports_csv
from .config import ParseError, parse_config
from .modes import ModeState, VerificationFailure, integrate_mode, verify_prop_keylin
from .params import Frequency, Params, ValidationError
from .runner import (
    BisectFailure,
    FitFailure,
    decay_rate_scan,
    growth_scan,
    run_simulation,
    threshold_scan,
)
from .symbols import weight_by_ode, weight_md, weight_mnu, weight_ms

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _nu_list(raw):
    try:
        values = [float(v) for v in raw.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad viscosity list {raw!r}") from None
    if any(v <= 0.0 for v in values):
        raise argparse.ArgumentTypeError("viscosities must be positive")
    return values


def _build_parser():
    parser = _Parser(prog="shearmhd",
                     description="Spectral toolkit for sheared MHD stability")
    sub = parser.add_subparsers(dest="command", required=True)

    lm = sub.add_parser("linear-mode", help="integrate one linearized mode")
    lm.add_argument("--k", type=int, required=True)
    lm.add_argument("--eta", type=float, required=True)
    lm.add_argument("--beta", type=float, required=True)
    lm.add_argument("--nu", type=float, required=True)
    lm.add_argument("--mu", type=float, required=True)
    lm.add_argument("--t-end", type=float, required=True)
    lm.add_argument("--tol", type=float, default=1e-8)
    lm.add_argument("--out", required=True)
    lm.add_argument("--verify", action="store_true",
                    help="also check the monotone-energy conclusions")
    lm.add_argument("--allow-out-of-theory", action="store_true")

    sim = sub.add_parser("simulate", help="run the nonlinear solver")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out-dir", required=True)

    for name, helptext in (("growth-scan", "transient-growth scaling in nu"),
                           ("decay-scan", "enhanced-dissipation scaling in nu")):
        sc = sub.add_parser(name, help=helptext)
        sc.add_argument("--nu", type=_nu_list, required=True,
                        help="comma-separated viscosities (at least 3)")
        sc.add_argument("--beta", type=float, default=2.0)
        sc.add_argument("--k", type=int, default=1)
        sc.add_argument("--eta", type=float, default=0.0)
        sc.add_argument("--out", default=None)

    th = sub.add_parser("threshold-scan", help="bisect the stability threshold")
    th.add_argument("--nu", type=_nu_list, required=True)
    th.add_argument("--config", required=True)
    th.add_argument("--eps-hi", type=float, default=10.0)
    th.add_argument("--iterations", type=int, default=10)
    th.add_argument("--out", default=None)

    au = sub.add_parser("audit", help="run all symbol-inequality audits")
    au.add_argument("--samples", type=int, default=100000)
    au.add_argument("--seed", type=int, default=0)
    au.add_argument("--beta", type=float, default=1.0)
    au.add_argument("--out", default=None)

    wc = sub.add_parser("weights-check", help="closed-form weights vs ODE oracle")
    wc.add_argument("--tuples", type=int, default=1000)
    wc.add_argument("--seed", type=int, default=0)
    wc.add_argument("--tol", type=float, default=1e-8)
    return parser


def _write_trajectory_csv(path, traj):
    cols = ["t", "re_omega", "im_omega", "re_j", "im_j", "re_z", "im_z",
            "re_q", "im_q", "e_sym", "d_sym",
            "l0", "l1", "l2", "l3", "l4", "l5", "m_d", "m_nu", "m_s"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for i in range(len(traj)):
            writer.writerow([
                traj.t[i], traj.omega[i].real, traj.omega[i].imag,
                traj.j[i].real, traj.j[i].imag, traj.z[i].real, traj.z[i].imag,
                traj.q[i].real, traj.q[i].imag, traj.e_sym[i], traj.d_sym[i],
                *traj.errors[i], traj.m_d[i], traj.m_nu[i], traj.m_s[i]])


def _write_scan_csv(path, result, response_name):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["nu", response_name])
        for nu, resp in zip(result.axis, result.responses):
            writer.writerow([nu, resp])
        writer.writerow(["slope", result.slope])
        writer.writerow(["slope_ci", result.slope_ci])


def _cmd_linear_mode(args):
    params = Params(nu=args.nu, mu=args.mu, beta=args.beta,
                    allow_out_of_theory=args.allow_out_of_theory)
    initial = ModeState(1.0 + 0j, 0j, Frequency(args.k, args.eta))
    traj = integrate_mode(initial, params, args.t_end, tolerance=args.tol)
    _write_trajectory_csv(args.out, traj)
    if args.verify:
        try:
            verdict = verify_prop_keylin(traj, params)
        except VerificationFailure as exc:
            print(f"verification failed: {exc}", file=sys.stderr)
            return EXIT_VERIFICATION
        print(f"verified: energy margin {verdict.energy_margin:.3e}, "
              f"decay constants {verdict.decay_constant_sym:.3g} / "
              f"{verdict.decay_constant_oj:.3g}")
    print(f"wrote {len(traj)} samples to {args.out}")
    return EXIT_OK


def _cmd_simulate(args):
    config = parse_config(args.config)
    ledger, _, verdict = run_simulation(config, out_dir=args.out_dir)
    label = "stable" if verdict.stable else "unstable"
    print(f"{label}: {len(ledger)} ledger rows written to {args.out_dir}")
    if not verdict.stable:
        print(f"violation of {verdict.violated_hypothesis} "
              f"at t={verdict.violation_time:.4g}")
    return EXIT_OK


def _scan_params(args):
    return Params(nu=args.nu[0], mu=args.nu[0], beta=args.beta)


def _cmd_growth_scan(args):
    result = growth_scan(args.nu, _scan_params(args),
                         frequency=Frequency(args.k, args.eta))
    if args.out:
        _write_scan_csv(args.out, result, "max_amplification")
    print(f"growth slope {result.slope:.4f} +- {result.slope_ci:.4f}")
    return EXIT_OK


def _cmd_decay_scan(args):
    result = decay_rate_scan(args.nu, _scan_params(args),
                             frequency=Frequency(args.k, args.eta))
    if args.out:
        _write_scan_csv(args.out, result, "decay_rate")
    print(f"decay-rate slope {result.slope:.4f} +- {result.slope_ci:.4f}")
    return EXIT_OK


def _cmd_threshold_scan(args):
    base = parse_config(args.config)
    result = threshold_scan(args.nu, base, eps_hi=args.eps_hi,
                            iterations=args.iterations)
    if args.out:
        _write_scan_csv(args.out, result, "eps_star")
    if result.slope is not None:
        print(f"threshold slope {result.slope:.4f} +- {result.slope_ci:.4f}")
    for nu, star in zip(result.axis, result.responses):
        print(f"nu={nu:g}: eps* ~ {star:.4g}")
    return EXIT_OK


def _cmd_audit(args):
    params = Params(nu=1e-4, mu=1e-4, beta=args.beta)
    reports = run_all_audits(args.samples, params, rng_seed=args.seed)
    if args.out:
        write_reports_csv(reports, args.out)
    ok = True
    for rep in reports:
        print(f"{rep.audit_name}: {rep.verdict} "
              f"(min slack {rep.min_slack:.3e} over {rep.samples} samples)")
        ok = ok and rep.passed
    return EXIT_OK if ok else EXIT_VERIFICATION


def _cmd_weights_check(args):
    rng = np.random.default_rng(args.seed)
    params = Params(nu=1e-4, mu=1e-4, beta=1.0)
    closed = {"md": weight_md, "mnu": weight_mnu, "ms": weight_ms}
    worst = 0.0
    for _ in range(args.tuples):
        k = int(rng.integers(1, 17)) * int(rng.choice([-1, 1]))
        eta = float(rng.uniform(-64.0, 64.0))
        t = float(rng.uniform(0.0, 100.0))
        nu = float(10.0 ** rng.uniform(-8.0, -1.0))
        p = Params(nu=nu, mu=nu, beta=params.beta, allow_out_of_theory=True)
        which = ("md", "mnu", "ms")[int(rng.integers(0, 3))]
        exact = closed[which](k, eta, t, p)
        oracle = weight_by_ode(which, k, eta, t, p)
        worst = max(worst, abs(exact - oracle) / abs(oracle))
    print(f"max relative deviation {worst:.3e} over {args.tuples} tuples")
    return EXIT_OK if worst < args.tol else EXIT_VERIFICATION


_COMMANDS = {
    "linear-mode": _cmd_linear_mode,
    "simulate": _cmd_simulate,
    "growth-scan": _cmd_growth_scan,
    "decay-scan": _cmd_decay_scan,
    "threshold-scan": _cmd_threshold_scan,
    "audit": _cmd_audit,
    "weights-check": _cmd_weights_check,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (ParseError, ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FitFailure, BisectFailure, VerificationFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
