"""Truncated Fourier grid for the 2pi x Ly periodic domain.

Spectral fields are complex (nx, ny) arrays in numpy FFT layout, holding the
coefficients f_hat such that f(x, y) = sum f_hat exp(i(k x + eta y)).  Real
fields carry Hermitian symmetry f_hat[-k, -eta] = conj(f_hat[k, eta]).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Grid:
    nx: int
    ny: int
    ly: float = 16.0 * np.pi
    dealias_fraction: float = 2.0 / 3.0

    kx: np.ndarray = field(init=False, repr=False)
    eta: np.ndarray = field(init=False, repr=False)
    mask: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.nx % 2 or self.ny % 2 or self.nx <= 0 or self.ny <= 0:
            raise ValueError("nx and ny must be even positive integers")
        kx1 = np.fft.fftfreq(self.nx, d=1.0 / self.nx)
        ey1 = np.fft.fftfreq(self.ny, d=1.0 / self.ny) * (2.0 * np.pi / self.ly)
        self.kx = kx1[:, None]
        self.eta = ey1[None, :]
        kcut = self.nx * self.dealias_fraction / 2.0
        ecut = (self.ny * self.dealias_fraction / 2.0) * (2.0 * np.pi / self.ly)
        self.mask = (np.abs(self.kx) < kcut) & (np.abs(self.eta) < ecut)

    @property
    def deta(self) -> float:
        return 2.0 * np.pi / self.ly

    @property
    def mode_weight(self) -> float:
        """Quadrature weight per retained mode in every discrete norm.

        (2pi)^2 * (2pi / Ly): the x-circle Plancherel factor together with the
        vertical frequency spacing, treating the eta grid as a Riemann sum for
        the continuum frequency integral.
        """
        return (2.0 * np.pi) ** 2 * (2.0 * np.pi / self.ly)

    def zeros(self) -> np.ndarray:
        return np.zeros((self.nx, self.ny), dtype=complex)

    def dealias(self, f_hat: np.ndarray) -> np.ndarray:
        return f_hat * self.mask

    def hermitianize(self, f_hat: np.ndarray) -> np.ndarray:
        """Project onto the real-field (Hermitian symmetric) subspace, exactly."""
        flipped = np.conj(np.roll(f_hat[::-1, ::-1], (1, 1), axis=(0, 1)))
        return 0.5 * (f_hat + flipped)

    def is_hermitian(self, f_hat: np.ndarray, tol: float = 0.0) -> bool:
        flipped = np.conj(np.roll(f_hat[::-1, ::-1], (1, 1), axis=(0, 1)))
        if tol == 0.0:
            return bool(np.array_equal(f_hat, flipped))
        scale = np.max(np.abs(f_hat)) or 1.0
        return bool(np.max(np.abs(f_hat - flipped)) <= tol * scale)

    def to_physical(self, f_hat: np.ndarray) -> np.ndarray:
        return np.fft.ifft2(f_hat).real * (self.nx * self.ny)

    def to_spectral(self, f_phys: np.ndarray) -> np.ndarray:
        return np.fft.fft2(f_phys) / (self.nx * self.ny)

    def sobolev_factor(self, n: int) -> np.ndarray:
        """<|k,eta|>^n on the grid (|a,b| = |a| + |b| convention)."""
        return (1.0 + (np.abs(self.kx) + np.abs(self.eta)) ** 2) ** (n / 2.0)

    def l2_norm(self, f_hat: np.ndarray) -> float:
        return float(np.sqrt(self.mode_weight * np.sum(np.abs(f_hat) ** 2)))

    def hn_norm_sq(self, f_hat: np.ndarray, n: int) -> float:
        w = self.sobolev_factor(n)
        return float(self.mode_weight * np.sum(w * w * np.abs(f_hat) ** 2))

    def hn_norm(self, f_hat: np.ndarray, n: int) -> float:
        return float(np.sqrt(self.hn_norm_sq(f_hat, n)))

    def p_array(self, t: float) -> np.ndarray:
        return self.kx**2 + (self.eta - self.kx * t) ** 2

    def dtp_array(self, t: float) -> np.ndarray:
        return -2.0 * self.kx * (self.eta - self.kx * t)

    def p_integral_array(self, t: float) -> np.ndarray:
        """Exact int_0^t p per mode."""
        ksafe = np.where(self.kx == 0.0, 1.0, self.kx)
        shear = (self.eta**3 - (self.eta - self.kx * t) ** 3) / (3.0 * ksafe)
        return self.kx**2 * t + np.where(self.kx == 0.0, self.eta**2 * t, shear)
