"""Plain-text run configuration: `key = value` lines, '#' comments."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .grid import Grid
from .params import Params, ValidationError


class ParseError(ValueError):
    """A config line could not be parsed; carries the 1-based line number."""

    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


@dataclass
class RunConfig:
    """Everything needed to reproduce one simulation run."""

    params: Params
    nx: int = 128
    ny: int = 128
    ly: float = 16.0 * math.pi
    dealias_fraction: float = 2.0 / 3.0
    eps: float = 1e-6
    seed: int = 0
    t_end: float = -1.0          # default 10 nu^{-1/3}, filled below
    dt: float = -1.0             # default from the CFL heuristic
    ledger_stride: int = 10
    snapshot_stride: int = 0     # 0 = initial and final snapshots only
    band: float = 4.0
    include_zero_modes: bool = False
    nonlinear: bool = True
    blowup_factor: float = 1e4   # instability ceiling is blowup_factor * eps
    run_id: str = "run"

    def __post_init__(self):
        if self.eps < 0.0:
            raise ValidationError(f"eps >= 0 violated: eps={self.eps}")
        if self.t_end <= 0.0 and self.t_end != -1.0:
            raise ValidationError(f"t_end > 0 violated: t_end={self.t_end}")
        if self.t_end == -1.0:
            nu = self.params.nu
            horizon = 10.0 * nu ** (-1.0 / 3.0) if nu > 0.0 else 10.0
            object.__setattr__(self, "t_end", horizon)
        if self.ledger_stride < 1:
            raise ValidationError("ledger_stride must be a positive integer")

    def make_grid(self) -> Grid:
        return Grid(nx=self.nx, ny=self.ny, ly=self.ly,
                    dealias_fraction=self.dealias_fraction)

    def echo(self) -> str:
        """Config text that parses back to an equal RunConfig."""
        p = self.params
        lines = [
            f"nu = {p.nu!r}", f"mu = {p.mu!r}", f"beta = {p.beta!r}",
            f"sobolev_n = {p.sobolev_n}", f"delta0 = {p.delta0!r}",
            f"c_beta = {p.c_beta!r}", f"gamma_beta = {p.gamma_beta!r}",
            f"allow_out_of_theory = {str(p.allow_out_of_theory).lower()}",
            f"nx = {self.nx}", f"ny = {self.ny}", f"ly = {self.ly!r}",
            f"dealias_fraction = {self.dealias_fraction!r}",
            f"eps = {self.eps!r}", f"seed = {self.seed}",
            f"t_end = {self.t_end!r}", f"dt = {self.dt!r}",
            f"ledger_stride = {self.ledger_stride}",
            f"snapshot_stride = {self.snapshot_stride}",
            f"band = {self.band!r}",
            f"include_zero_modes = {str(self.include_zero_modes).lower()}",
            f"nonlinear = {str(self.nonlinear).lower()}",
            f"blowup_factor = {self.blowup_factor!r}",
            f"run_id = {self.run_id}",
        ]
        return "\n".join(lines) + "\n"


_PARAM_KEYS = {
    "nu": float, "mu": float, "beta": float, "sobolev_n": int,
    "delta0": float, "c_beta": float, "gamma_beta": float,
    "allow_out_of_theory": bool,
}
_RUN_KEYS = {
    "nx": int, "ny": int, "ly": float, "dealias_fraction": float,
    "eps": float, "seed": int, "t_end": float, "dt": float,
    "ledger_stride": int, "snapshot_stride": int, "band": float,
    "include_zero_modes": bool, "nonlinear": bool, "blowup_factor": float,
    "run_id": str,
}


def _convert(kind, raw, lineno):
    if kind is bool:
        low = raw.lower()
        if low in ("true", "1", "yes", "on"):
            return True
        if low in ("false", "0", "no", "off"):
            return False
        raise ParseError(lineno, f"expected a boolean, got {raw!r}")
    if kind is str:
        return raw
    try:
        return kind(raw)
    except ValueError:
        raise ParseError(lineno, f"expected {kind.__name__}, got {raw!r}") from None


def parse_config_text(text: str) -> RunConfig:
    param_kwargs = {}
    run_kwargs = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError(lineno, f"expected 'key = value', got {body!r}")
        key, _, raw = body.partition("=")
        key = key.strip()
        raw = raw.strip()
        if not raw:
            raise ParseError(lineno, f"missing value for key {key!r}")
        if key in _PARAM_KEYS:
            param_kwargs[key] = _convert(_PARAM_KEYS[key], raw, lineno)
        elif key in _RUN_KEYS:
            run_kwargs[key] = _convert(_RUN_KEYS[key], raw, lineno)
        else:
            raise ParseError(lineno, f"unknown key {key!r}")
    for required in ("nu", "mu", "beta"):
        if required not in param_kwargs:
            raise ValidationError(f"missing required key: {required}")
    params = Params(**param_kwargs)
    return RunConfig(params=params, **run_kwargs)


def parse_config(path) -> RunConfig:
    with open(path) as fh:
        return parse_config_text(fh.read())
