"""Damped subwavelength resonator chains in the capacitance approximation.

The chain has ``N = 4m + 1`` unit-length resonators placed mirror
symmetrically about the central resonator ``D0``.  Moving right from
``D0`` the gaps alternate ``s2, s1, s2, s1, ...``; the left half is the
mirror image.  Resonances follow from the eigenvalues of the generalized
capacitance matrix ``v_b^2 C``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .interface import InterfaceSpec
from .numerics import TridiagonalMatrix, eigs_tridiagonal
from .spectra import essential_spectrum, gap_region, in_region
from .symbol import UnitCell, make_unit_cell


@dataclass(frozen=True)
class ResonatorChain:
    m: int
    s1: float
    s2: float
    v_b: complex = 1.0 + 0j
    delta: float = 1e-3

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 1:
            raise ConfigError("m must be a positive integer")
        if not (self.s1 > 0 and self.s2 > 0):
            raise ConfigError("spacings must be positive")
        if not 0 < self.delta < 1:
            raise ConfigError("delta must lie in (0, 1)")
        v = complex(self.v_b)
        if v == 0 or not np.isfinite(v):
            raise ConfigError("wave speed must be finite and nonzero")
        object.__setattr__(self, "v_b", v)
        object.__setattr__(self, "m", int(self.m))

    @property
    def n(self) -> int:
        return 4 * self.m + 1

    def spacings(self) -> np.ndarray:
        """The ``N - 1`` gaps from left to right."""
        right = np.tile([self.s2, self.s1], self.m)
        return np.concatenate([right[::-1], right]).astype(float)


@dataclass(frozen=True)
class ResonanceSet:
    lam: np.ndarray
    omega: np.ndarray


def capacitance_from_spacings(spacings: np.ndarray) -> TridiagonalMatrix:
    """Nearest-neighbour capacitance matrix for unit resonators with given gaps."""
    g = np.asarray(spacings, dtype=float)
    if g.ndim != 1 or g.size == 0 or np.any(g <= 0):
        raise ConfigError("spacings must be a non-empty array of positive numbers")
    inv = 1.0 / g
    diag = np.zeros(g.size + 1)
    diag[:-1] += inv
    diag[1:] += inv
    return TridiagonalMatrix(diag, -inv, -inv)


def capacitance_matrix(chain: ResonatorChain) -> TridiagonalMatrix:
    return capacitance_from_spacings(chain.spacings())


def _scaled(T: TridiagonalMatrix, factor: complex) -> TridiagonalMatrix:
    return TridiagonalMatrix(T.diag * factor, T.lower * factor, T.upper * factor)


def generalized_capacitance(chain: ResonatorChain) -> TridiagonalMatrix:
    """``v_b^2 C``."""
    return _scaled(capacitance_matrix(chain), chain.v_b ** 2)


def resonances(chain: ResonatorChain) -> ResonanceSet:
    lam = eigs_tridiagonal(generalized_capacitance(chain)).values
    lam = lam[np.lexsort((lam.imag, lam.real))]
    if lam.size > 1:
        gaps = np.abs(lam[:, None] - lam[None, :]) + np.diag(np.full(lam.size, np.inf))
        if np.min(gaps) < 1e-8:
            warnings.warn("capacitance eigenvalues are not simple; resonance pairing is ambiguous",
                          RuntimeWarning, stacklevel=2)
    return ResonanceSet(lam, np.sqrt(chain.delta * lam))


def bulk_cell(chain: ResonatorChain) -> UnitCell:
    """Dimer cell of the generalized capacitance matrix away from the ends."""
    v2 = chain.v_b ** 2
    alpha = 1.0 / chain.s1 + 1.0 / chain.s2
    return make_unit_cell([alpha * v2, alpha * v2], [-v2 / chain.s1, -v2 / chain.s2])


def interface_spec(chain: ResonatorChain) -> InterfaceSpec:
    """Shared-site interface equivalent of the chain (up to the two end corners)."""
    v2 = chain.v_b ** 2
    q = -v2 / chain.s2
    return InterfaceSpec(bulk_cell(chain), "shared_site", 2.0 * v2 / chain.s2, q, q)


def with_interface_spacing(chain: ResonatorChain, s_int: float,
                           adjust_neighbours: bool = False) -> TridiagonalMatrix:
    """Generalized capacitance with the two gaps next to ``D0`` set to ``s_int``.

    By default only the central on-site term and the two couplings to it are
    updated; the on-site terms of ``D-1`` and ``D1`` keep their bulk value.
    With ``adjust_neighbours`` those are recomputed from the new gaps too.
    """
    if s_int <= 0:
        raise ConfigError("s_int must be positive")
    if adjust_neighbours:
        g = chain.spacings()
        c = g.size // 2
        g[c - 1] = g[c] = s_int
        return _scaled(capacitance_from_spacings(g), chain.v_b ** 2)
    C = capacitance_matrix(chain)
    diag, lower, upper = C.diag.copy(), C.lower.copy(), C.upper.copy()
    c = chain.n // 2
    diag[c] = 2.0 / s_int
    for arr in (lower, upper):
        arr[c - 1] = arr[c] = -1.0 / s_int
    return _scaled(TridiagonalMatrix(diag, lower, upper), chain.v_b ** 2)


def robustness_sweep(chain: ResonatorChain, kind: str, values: Sequence[float],
                     trials: int = 1, seed: int = 0,
                     adjust_neighbours: bool = False) -> list[tuple]:
    """Spectra under compact or global perturbations of the spacings.

    ``interface_spacings`` varies the two gaps next to ``D0`` over
    ``values``.  ``all_spacings`` multiplies every gap by ``1 + u`` with
    ``u`` uniform on ``[-level, level]`` for each noise level in ``values``
    and each trial.  Rows are ``(param_value, trial, eig_index, re, im)``
    with eigenvalues sorted by real then imaginary part.
    """
    rows: list[tuple] = []

    def emit(param: float, trial: int, M: TridiagonalMatrix) -> None:
        lam = eigs_tridiagonal(M).values
        lam = lam[np.lexsort((lam.imag, lam.real))]
        rows.extend((float(param), trial, i, float(x.real), float(x.imag))
                    for i, x in enumerate(lam))

    if kind == "interface_spacings":
        for s_int in values:
            emit(s_int, 0, with_interface_spacing(chain, float(s_int), adjust_neighbours))
    elif kind == "all_spacings":
        if trials < 1:
            raise ConfigError("trials must be positive")
        base = chain.spacings()
        for level_index, level in enumerate(values):
            if not 0 <= level < 1:
                raise ConfigError("noise level must lie in [0, 1)")
            for t in range(trials):
                rng = np.random.default_rng(np.random.SeedSequence([seed, level_index, t]))
                g = base * (1.0 + rng.uniform(-level, level, base.size))
                emit(level, t, _scaled(capacitance_from_spacings(g), chain.v_b ** 2))
    else:
        raise ConfigError(f"unknown perturbation kind {kind!r}")
    return rows


def gap_eigenvalues(chain: ResonatorChain, values: np.ndarray,
                    margin: float = 1e-2) -> np.ndarray:
    """Eigenvalues lying in the central gap of the bulk, at least ``margin`` from the bands."""
    ess = essential_spectrum(bulk_cell(chain), 1024)
    box = gap_region(ess, 0, inflate=0.0)
    vals = np.asarray(values, dtype=complex)
    keep = [lam for lam in vals if in_region(lam, box) and ess.distance(lam)[0] > margin]
    return np.array(keep, dtype=complex)
