"""Randomized numerical audits of the pointwise symbol inequalities.

Each audit draws a deterministic random sample cloud, evaluates the inequality
slack on every sample, and either returns a report with the minimum slack or
raises :class:`AuditFailure` with the violating tuple.

Sampling ranges: k in [-64, 64] \\ {0}, eta in [-256, 256], t in [0, 1e3],
log-uniform nu in [1e-8, 1e-1].

Two of the checked inequalities are stated in the source material with an
implicit constant; here they are pinned to explicit ones that hold pointwise:
the same-k frequency-ratio bound carries a factor sqrt(2), and the cross-k
bound carries a factor 3/2 with the resonant-interval factor floored at 1.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, fields

import numpy as np

from .params import Frequency, Params
from .symbols import dt_weight_mnu_ratio, p_symbol, resonant_interval, sobolev_bracket

PKP_CONSTANT = np.sqrt(2.0)
PP_CONSTANT = 1.5


class AuditFailure(Exception):
    """An inequality audit found a violating sample."""

    def __init__(self, audit_name, slack, sample):
        self.audit_name = audit_name
        self.slack = slack
        self.sample = sample
        super().__init__(f"{audit_name}: slack {slack:.3e} at {sample}")


@dataclass
class AuditReport:
    audit_name: str
    samples: int
    min_slack: float
    argmin_k: float
    argmin_eta: float
    argmin_t: float
    verdict: str
    seed: int = 0

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"


def write_reports_csv(reports, path):
    cols = [f.name for f in fields(AuditReport)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for rep in reports:
            writer.writerow([getattr(rep, c) for c in cols])


def _sample_k(rng, n):
    return rng.integers(1, 65, n) * rng.choice([-1, 1], n)


def _finish(name, slack, k, eta, t, seed, raise_on_fail=True):
    i = int(np.argmin(slack))
    report = AuditReport(
        audit_name=name,
        samples=len(slack),
        min_slack=float(slack[i]),
        argmin_k=float(np.asarray(k)[i]),
        argmin_eta=float(np.asarray(eta)[i]),
        argmin_t=float(np.asarray(t)[i]),
        verdict="PASS" if slack[i] >= 0.0 else "FAIL",
        seed=seed,
    )
    if raise_on_fail and not report.passed:
        raise AuditFailure(name, report.min_slack,
                           (report.argmin_k, report.argmin_eta, report.argmin_t))
    return report


def audit_keymnu(sample_count: int, params: Params, rng_seed: int = 0) -> AuditReport:
    """Check nu*p + dt(m^nu)/m^nu >= nu^{1/3}/4 on random (k, eta, t, nu)."""
    rng = np.random.default_rng(rng_seed)
    k = _sample_k(rng, sample_count)
    eta = rng.uniform(-256.0, 256.0, sample_count)
    t = rng.uniform(0.0, 1e3, sample_count)
    nu = 10.0 ** rng.uniform(-8.0, -1.0, sample_count)
    # bias a third of the samples towards the worst diffusion point t = eta/k
    m = sample_count // 3
    t[:m] = np.clip(eta[:m] / k[:m] + rng.normal(0.0, 0.5, m), 0.0, 1e3)

    lam = nu ** (1.0 / 3.0)
    s = eta / k - t
    ratio = lam / (1.0 + lam * lam * s * s)
    slack = nu * p_symbol(k, eta, t) + ratio - lam / 4.0
    return _finish("keymnu", slack, k, eta, t, rng_seed)


def audit_freq_ratio(sample_count: int, rng_seed: int = 0) -> AuditReport:
    """Check the frequency-ratio bounds for the symbol p across mode pairs.

    Same-k bound: sqrt(p_k(xi)/p_k(eta)) <= sqrt(2) (1 + |eta-xi| / (|k|(1+|eta/k-t|))).
    Cross-k bound: sqrt(p_l(xi)/p_k(eta)) <= (3/2) <|k-l, eta-xi|>^3 * F, where F is
    max(1, |eta| / (k^2 (1+|eta/k-t|))) on resonant/non-resonant pairs and 1 otherwise.
    """
    rng = np.random.default_rng(rng_seed)
    n = sample_count
    k = _sample_k(rng, n)
    ell = _sample_k(rng, n)
    ell[: n // 2] = k[: n // 2]  # exercise the improved same-k estimate densely
    eta = rng.uniform(-256.0, 256.0, n)
    xi = rng.uniform(-256.0, 256.0, n)
    xi[: n // 3] = eta[: n // 3] + rng.normal(0.0, 2.0, n // 3)
    t = rng.uniform(0.0, 1e3, n)
    # bias towards the resonant interval of (k, eta)
    m = n // 3
    t[:m] = np.clip(eta[:m] / k[:m]
                    + rng.uniform(-1.0, 1.0, m) * np.abs(eta[:m]) / (2.0 * k[:m] ** 2),
                    0.0, 1e3)

    lhs = np.sqrt(p_symbol(ell, xi, t) / p_symbol(k, eta, t))
    in_keta = np.abs(t - eta / k) <= np.abs(eta) / (2.0 * k * k)
    in_lxi = np.abs(t - xi / ell) <= np.abs(xi) / (2.0 * ell * ell)
    res_factor = np.where(
        in_keta & ~in_lxi,
        np.maximum(1.0, np.abs(eta) / (k * k * (1.0 + np.abs(eta / k - t)))),
        1.0,
    )
    cube = sobolev_bracket(k - ell, eta - xi) ** 3
    slack_pp = PP_CONSTANT * cube * res_factor - lhs

    same = ell == k
    rhs_pkp = PKP_CONSTANT * (
        1.0 + np.abs(eta - xi) / (np.abs(k) * (1.0 + np.abs(eta / k - t))))
    slack_pkp = np.where(same, rhs_pkp - lhs, np.inf)

    slack = np.minimum(slack_pp, slack_pkp)
    return _finish("freq_ratio", slack, k, eta, t, rng_seed)


def audit_lossy_elliptic(sample_count: int, rng_seed: int = 0) -> AuditReport:
    """Check p_k(t, eta) <|k,eta|>^2 >= <t>^2 / 2 for k != 0."""
    rng = np.random.default_rng(rng_seed)
    k = _sample_k(rng, sample_count)
    eta = rng.uniform(-256.0, 256.0, sample_count)
    t = rng.uniform(0.0, 1e3, sample_count)
    # worst case sits near the critical time
    m = sample_count // 3
    t[:m] = np.clip(eta[:m] / k[:m] + rng.normal(0.0, 1.0, m), 0.0, 1e3)

    slack = p_symbol(k, eta, t) * sobolev_bracket(k, eta) ** 2 - (1.0 + t * t) / 2.0
    return _finish("lossy_elliptic", slack, k, eta, t, rng_seed)


def audit_pneq0(sample_count: int, params: Params, rng_seed: int = 0) -> AuditReport:
    """Check the multiplier identities tying sqrt(k^2/p) to the m^d rate.

    Exact identity: sqrt(k^2/p) = C_beta^{-1/2} sqrt(dt m^d / m^d); and
    |k|/p <= (1/sqrt(C_beta)) sqrt(dt m^d / m^d) sqrt(k^2/p).
    """
    rng = np.random.default_rng(rng_seed)
    k = _sample_k(rng, sample_count)
    eta = rng.uniform(-256.0, 256.0, sample_count)
    t = rng.uniform(0.0, 1e3, sample_count)

    p = p_symbol(k, eta, t)
    md_ratio = params.c_beta / (1.0 + (eta / k - t) ** 2)
    ident = np.sqrt(k * k / p) - np.sqrt(md_ratio / params.c_beta)
    slack_ident = 1e-12 - np.abs(ident)
    bound = (np.sqrt(md_ratio) * np.sqrt(k * k / p) / np.sqrt(params.c_beta)
             - np.abs(k) / p)
    slack = np.minimum(slack_ident, bound + 1e-15)
    return _finish("pneq0", slack, k, eta, t, rng_seed)


def run_all_audits(sample_count: int, params: Params, rng_seed: int = 0,
                   raise_on_fail: bool = False):
    """Run every audit, returning the list of reports (failures included)."""
    reports = []
    for fn, args in (
        (audit_keymnu, (sample_count, params, rng_seed)),
        (audit_freq_ratio, (sample_count, rng_seed)),
        (audit_lossy_elliptic, (sample_count, rng_seed)),
        (audit_pneq0, (sample_count, params, rng_seed)),
    ):
        try:
            reports.append(fn(*args))
        except AuditFailure as exc:
            if raise_on_fail:
                raise
            reports.append(AuditReport(
                audit_name=exc.audit_name, samples=sample_count,
                min_slack=exc.slack, argmin_k=exc.sample[0],
                argmin_eta=exc.sample[1], argmin_t=exc.sample[2],
                verdict="FAIL", seed=rng_seed))
    return reports
