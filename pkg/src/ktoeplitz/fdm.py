"""Finite-difference discretisation of a periodic 1-D divergence-form operator.

The operator ``-(1/mu0) d/dx (1/eps du/dx)`` on a unit cell is sampled at the
cell-centred nodes ``x_j = (j - 1/2)/k``.  Each node takes the permittivity
of the material it sits in, so material interfaces snap to the nearest
grid face.  Face coefficients are harmonic means of the two neighbouring
``1/eps`` values.  The result is a real symmetric k-periodic tridiagonal
operator, i.e. a :class:`~ktoeplitz.symbol.UnitCell`.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .interface import InterfaceSpec, matched_function
from .symbol import UnitCell, make_unit_cell, principal_submatrices, symbol_at


@dataclass(frozen=True)
class FdmConfig:
    k: int
    eps_inside: float = 10.0
    eps_outside: float = 1.0
    mu0: float = 1.0
    intervals: tuple = ((0.2, 0.45), (0.55, 0.8))

    def __post_init__(self) -> None:
        if int(self.k) != self.k or self.k < 4:
            raise ConfigError("k must be an integer >= 4")
        for name in ("eps_inside", "eps_outside", "mu0"):
            val = getattr(self, name)
            if not (np.isreal(val) and val > 0):
                raise ConfigError(f"{name} must be a positive real number")
        ivs = tuple((float(lo), float(hi)) for lo, hi in self.intervals)
        for lo, hi in ivs:
            if not 0 <= lo < hi <= 1:
                raise ConfigError(f"resonator interval ({lo}, {hi}) must lie inside [0, 1]")
        edges = sorted(ivs)
        for (_, h0), (l1, _) in zip(edges, edges[1:]):
            if l1 < h0:
                raise ConfigError("resonator intervals overlap")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "intervals", tuple(edges))

    @property
    def dx(self) -> float:
        return 1.0 / self.k

    def nodes(self) -> np.ndarray:
        return (np.arange(1, self.k + 1) - 0.5) / self.k


def node_permittivity(cfg: FdmConfig) -> np.ndarray:
    x = cfg.nodes()
    eps = np.full(cfg.k, float(cfg.eps_outside))
    for lo, hi in cfg.intervals:
        eps[(x > lo) & (x < hi)] = cfg.eps_inside
    return eps


def assemble_fdm_cell(cfg: FdmConfig) -> UnitCell:
    kappa = 1.0 / node_permittivity(cfg)
    nxt = np.roll(kappa, -1)
    face = 2.0 * kappa * nxt / (kappa + nxt)          # face j+1/2, last one wraps
    scale = 1.0 / (cfg.mu0 * cfg.dx ** 2)
    a = (np.roll(face, 1) + face) * scale
    b = -face * scale
    return make_unit_cell(a, b)


def band_intervals(cell: UnitCell) -> np.ndarray:
    """Bands of a real symmetric cell as rows ``(lo, hi)``.

    For such cells every band edge is attained at ``z = 1`` or ``z = -1``.
    """
    if not (cell.is_symmetric and np.all(cell.a.imag == 0) and np.all(cell.b.imag == 0)):
        raise ValueError("band_intervals needs a real symmetric cell")
    plus = np.linalg.eigvalsh(symbol_at(cell, 1.0).real)
    minus = np.linalg.eigvalsh(symbol_at(cell, -1.0).real)
    return np.column_stack([np.minimum(plus, minus), np.maximum(plus, minus)])


def distance_to_bands(values: np.ndarray, bands: np.ndarray) -> np.ndarray:
    v = np.atleast_1d(np.asarray(values, dtype=float))
    lo, hi = bands[:, 0][None, :], bands[:, 1][None, :]
    d = np.maximum(np.maximum(lo - v[:, None], v[:, None] - hi), 0.0)
    return d.min(axis=1)


def first_gap(cfg: FdmConfig) -> tuple[float, float]:
    bands = band_intervals(assemble_fdm_cell(cfg))
    lo, hi = float(bands[0, 1]), float(bands[1, 0])
    if hi - lo <= 1e-9 * max(abs(lo), abs(hi), 1.0):
        raise ValueError("the first two bands touch or overlap; no gap")
    return lo, hi


def b0_convergence(cfg: FdmConfig, k_list: Sequence[int], n_track: int = 3) -> list[tuple]:
    """Distance of the lowest ``n_track`` ``B0`` eigenvalues to the bands, per ``k``.

    Rows are ``(k, b0_index, value, distance_to_band)``.  Only the low end
    of ``sigma(B0)`` approximates the continuum; the upper values sit at
    the lattice scale and are not tracked.
    """
    ks = list(k_list)
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("k_list must be strictly increasing")
    rows = []
    for k in ks:
        cell = assemble_fdm_cell(replace(cfg, k=k))
        B0, _ = principal_submatrices(cell)
        vals = np.linalg.eigvalsh(B0.real)[:n_track]
        dist = distance_to_bands(vals, band_intervals(cell))
        rows.extend((k, i, float(v), float(dd)) for i, (v, dd) in enumerate(zip(vals, dist)))
    return rows


def interface_at_resonator(cfg: FdmConfig, which: int = 0) -> InterfaceSpec:
    """Shared-site interface centred on the node closest to a resonator midpoint.

    The cell is rotated so that node is its last site; the interface then
    mirrors the medium about that node with ``eta = a_k`` and ``q = s = b_k``.
    """
    if not 0 <= which < len(cfg.intervals):
        raise ConfigError("resonator index out of range")
    lo, hi = cfg.intervals[which]
    j = int(np.argmin(np.abs(cfg.nodes() - 0.5 * (lo + hi))))
    cell = assemble_fdm_cell(cfg).shifted(j + 1)
    return InterfaceSpec(cell, "shared_site", cell.a[-1], cell.b[-1], cell.b[-1])


def impedance_curve(cfg: FdmConfig, gap_grid: Sequence[float],
                    which: int = 0) -> list[tuple]:
    """``(omega2, Re F, Im F)`` over points of the first spectral gap."""
    lo, hi = first_gap(cfg)
    grid = np.asarray(gap_grid, dtype=float)
    if np.any(grid <= lo) or np.any(grid >= hi):
        raise ValueError(f"grid points must lie strictly inside the gap ({lo:.6g}, {hi:.6g})")
    spec = interface_at_resonator(cfg, which)
    rows = []
    for w2 in grid:
        val = matched_function(spec, float(w2))
        rows.append((float(w2), float(val.real), float(val.imag)))
    return rows


def gap_fraction_grid(cfg: FdmConfig, fractions: Sequence[float]) -> np.ndarray:
    lo, hi = first_gap(cfg)
    return lo + np.asarray(fractions, dtype=float) * (hi - lo)
