"""Physical parameters and validity checks for the sheared MHD problem."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple


class ValidationError(ValueError):
    """A parameter set violates one of the admissibility inequalities."""


class Frequency(NamedTuple):
    """A single Fourier mode: integer horizontal wavenumber, real vertical frequency."""

    k: int
    eta: float


def default_c_beta(beta: float) -> float:
    return max(1.0, 4.0 / abs(beta)) if beta != 0.0 else 1.0


def default_gamma_beta(beta: float) -> float:
    if abs(beta) <= 0.5:
        return 1.0
    return 2.0 / (abs(beta) - 0.5)


@dataclass(frozen=True)
class Params:
    """Viscosity, resistivity, background field strength and the proof constants.

    ``allow_out_of_theory`` disables the checks tied to the coercivity regime
    (|beta| > 1/2 and the Prandtl-number inequality) so that the explicitly
    solvable beta = 0 configurations can be run as controls.
    """

    nu: float
    mu: float
    beta: float
    sobolev_n: int = 11
    delta0: float = 0.01
    c_beta: float = field(default=-1.0)
    gamma_beta: float = field(default=-1.0)
    allow_out_of_theory: bool = False

    def __post_init__(self):
        if self.c_beta <= 0.0:
            object.__setattr__(self, "c_beta", default_c_beta(self.beta))
        if self.gamma_beta <= 0.0:
            object.__setattr__(self, "gamma_beta", default_gamma_beta(self.beta))
        self.validate()

    def validate(self):
        if not self.allow_out_of_theory:
            if not (0.0 < self.nu <= self.mu < 1.0):
                raise ValidationError(
                    f"0 < nu <= mu < 1 violated: nu={self.nu}, mu={self.mu}")
            if not abs(self.beta) > 0.5:
                raise ValidationError(f"|beta| > 1/2 violated: beta={self.beta}")
            if not self.nu >= (16.0 * self.mu / self.beta**2) ** 3:
                raise ValidationError(
                    "nu >= (16*mu/beta^2)^3 violated: "
                    f"nu={self.nu}, bound={(16.0 * self.mu / self.beta**2) ** 3:.3e}")
            if not 1.0 / (abs(self.beta) * self.c_beta) <= 0.25:
                raise ValidationError(
                    "1/(|beta|*C_beta) <= 1/4 violated: "
                    f"beta={self.beta}, C_beta={self.c_beta}")
            if not (1.0 / abs(self.beta)) * (0.5 + 1.0 / self.gamma_beta) < 1.0:
                raise ValidationError(
                    "(1/|beta|)*(1/2 + 1/gamma_beta) < 1 violated: "
                    f"beta={self.beta}, gamma_beta={self.gamma_beta}")
        else:
            if not (0.0 <= self.nu <= self.mu < 1.0 or (self.nu == 0.0 and self.mu == 0.0)):
                if not (0.0 <= self.nu and 0.0 <= self.mu < 1.0):
                    raise ValidationError(
                        f"0 <= nu, mu < 1 violated: nu={self.nu}, mu={self.mu}")
        if not (isinstance(self.sobolev_n, int) and self.sobolev_n > 10):
            raise ValidationError(f"N must be an integer > 10, got {self.sobolev_n}")
        if not 0.0 < self.delta0 < 1.0 / 64.0:
            raise ValidationError(f"delta0 in (0, 1/64) violated: delta0={self.delta0}")

    @property
    def prandtl_m(self) -> float:
        return self.nu / self.mu if self.mu > 0 else float("nan")

    @property
    def nu_third(self) -> float:
        return self.nu ** (1.0 / 3.0)
