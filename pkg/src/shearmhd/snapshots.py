"""Binary snapshot format for solver states.

Layout (little-endian): magic "MHDC1", then int64 nx, ny, then float64
Ly, t, nu, mu, beta, then interleaved Re/Im float64 pairs for omega followed
by j, over the retained (non-dealiased) band in row-major (k-major) order.
"""
from __future__ import annotations

import struct

import numpy as np

from .grid import Grid
from .solver import MhdState

MAGIC = b"MHDC1"
_HEADER = struct.Struct("<5sqqddddd")


class SnapshotError(ValueError):
    pass


def write_snapshot(path, grid: Grid, state: MhdState, params) -> None:
    sel = grid.mask
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, grid.nx, grid.ny, grid.ly, state.time,
                              params.nu, params.mu, params.beta))
        for f in (state.omega, state.j):
            vals = f[sel]
            buf = np.empty(2 * len(vals))
            buf[0::2] = vals.real
            buf[1::2] = vals.imag
            fh.write(buf.astype("<f8").tobytes())


def read_snapshot(path):
    """Returns (grid, state, header dict). Grid is rebuilt from the header."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise SnapshotError("truncated snapshot header")
        magic, nx, ny, ly, t, nu, mu, beta = _HEADER.unpack(head)
        if magic != MAGIC:
            raise SnapshotError(f"bad magic {magic!r}")
        grid = Grid(nx=int(nx), ny=int(ny), ly=float(ly))
        n_band = int(grid.mask.sum())
        fields = []
        for _ in range(2):
            raw = np.frombuffer(fh.read(16 * n_band), dtype="<f8")
            if len(raw) != 2 * n_band:
                raise SnapshotError("truncated snapshot payload")
            f = grid.zeros()
            f[grid.mask] = raw[0::2] + 1j * raw[1::2]
            fields.append(f)
    state = MhdState(fields[0], fields[1], float(t))
    header = {"nx": int(nx), "ny": int(ny), "ly": float(ly), "t": float(t),
              "nu": float(nu), "mu": float(mu), "beta": float(beta)}
    return grid, state, header
