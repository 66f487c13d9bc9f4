"""Essential spectra, the Gamma curve and finite sections.

Curves are sampled on ``z = rho * exp(i alpha)`` with ``alpha`` running over
``[-pi, pi]`` (both endpoints included, so every branch is a closed or
endpoint-matched polyline).  Eigenvalue branches are kept continuous in
``alpha`` by optimal nearest-neighbour assignment between neighbouring samples.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize_scalar

from .numerics import (
    EigenDecomposition,
    TridiagonalMatrix,
    distance_to_polyline,
    eigs_tridiagonal,
    winding_number,
)
from .symbol import UnitCell, symbol_at, symbol_stack, viete_data


@dataclass(frozen=True)
class SpectralCurve:
    """Eigenvalue branches of ``f(rho e^{i alpha})``; ``values`` has shape ``(k, samples)``."""

    alpha: np.ndarray
    values: np.ndarray
    radius: float = 1.0

    @property
    def k(self) -> int:
        return int(self.values.shape[0])

    def points(self) -> np.ndarray:
        return self.values.ravel()

    def distance(self, points) -> np.ndarray:
        """Distance from each point to the nearest branch polyline."""
        p = np.atleast_1d(np.asarray(points, dtype=complex))
        return np.min([distance_to_polyline(p, br) for br in self.values], axis=0)

    def rows(self):
        """``(alpha, branch_index, re, im)`` tuples in CSV order."""
        for j, alpha in enumerate(self.alpha):
            for i in range(self.k):
                lam = self.values[i, j]
                yield float(alpha), i, float(lam.real), float(lam.imag)


def _sort_branches(columns: np.ndarray) -> np.ndarray:
    """Reorder each column to continue the previous one; shape ``(samples, k)``."""
    out = columns.copy()
    for j in range(1, out.shape[0]):
        cost = np.abs(out[j - 1][:, None] - out[j][None, :])
        _, perm = linear_sum_assignment(cost)
        out[j] = out[j][perm]
    return out


def sample_symbol_spectrum(cell: UnitCell, radius: float = 1.0,
                           samples: int = 512) -> SpectralCurve:
    if samples < 8:
        raise ValueError("need at least 8 samples")
    alpha = np.linspace(-np.pi, np.pi, samples)
    cols = np.linalg.eigvals(symbol_stack(cell, radius * np.exp(1j * alpha)))
    return SpectralCurve(alpha, _sort_branches(cols).T, float(radius))


def refined_distance(cell: UnitCell, points, radius: float = 1.0,
                     samples: int = 512) -> np.ndarray:
    """Distance from points to the spectrum of ``f`` on ``|z| = radius``.

    A coarse polyline estimate is sharpened by a bounded 1-D minimisation in
    ``alpha`` around the closest samples.  This matters near band touchings,
    where the curve has a square-root cusp that a polyline resolves poorly.
    """
    curve = sample_symbol_spectrum(cell, radius, samples)
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    coarse = curve.distance(pts)
    step = curve.alpha[1] - curve.alpha[0]

    def gap_at(delta: float, alpha0: float, lam: complex) -> float:
        ev = np.linalg.eigvals(symbol_at(cell, radius * np.exp(1j * (alpha0 + delta))))
        return float(np.min(np.abs(ev - lam)))

    out = coarse.copy()
    for i, lam in enumerate(pts):
        per_alpha = np.min(np.abs(curve.values - lam), axis=0)
        for j in np.argsort(per_alpha)[:3]:
            # optimise the offset, not alpha itself, so the relative
            # tolerance of the bracket search acts on a small number
            res = minimize_scalar(gap_at, bounds=(-step, step), args=(curve.alpha[j], lam),
                                  method="bounded", options={"xatol": 1e-15})
            out[i] = min(out[i], float(res.fun))
    return out


def essential_spectrum(cell: UnitCell, samples: int = 512) -> SpectralCurve:
    """Spectrum of the symbol on the unit circle."""
    return sample_symbol_spectrum(cell, 1.0, samples)


def gamma_set(cell: UnitCell, samples: int = 512) -> SpectralCurve:
    """Spectrum of the symbol on the circle ``|z| = sqrt|prod(b)/prod(c)|``.

    These are exactly the ``lam`` at which both Floquet multipliers share a
    modulus.
    """
    r = viete_data(cell).radius
    return sample_symbol_spectrum(cell, r, samples)


def winding_region_membership(cell: UnitCell, lam: complex, samples: int = 1024,
                              margin: float = 1e-6) -> int:
    """Winding number of ``alpha -> det(f(e^{i alpha}) - lam)`` about zero.

    Nonzero exactly when ``lam`` lies in the spectrum of the semi-infinite
    operator but off its essential spectrum.  Raises ``ValueError`` if
    ``lam`` is within ``margin`` of the essential spectrum.
    """
    lam = complex(lam)
    curve = essential_spectrum(cell, max(samples, 64))
    if curve.distance(lam)[0] <= margin:
        raise ValueError(f"lam = {lam} lies on the essential spectrum")
    n = samples
    while True:
        theta = 2.0 * np.pi * np.arange(n) / n
        eye = np.eye(cell.k)
        dets = np.linalg.det(symbol_stack(cell, np.exp(1j * theta)) - lam * eye)
        try:
            return winding_number(dets)
        except ValueError:
            if n >= 1 << 16:
                raise
            n *= 2


def truncate(cell: UnitCell, m: int) -> TridiagonalMatrix:
    """Finite section with ``m`` full cells (dimension ``m k``)."""
    if m < 1:
        raise ValueError("m must be a positive number of cells")
    diag = np.tile(cell.a, m)
    upper = np.tile(cell.b, m)[:-1]
    lower = np.tile(cell.c, m)[:-1]
    return TridiagonalMatrix(diag, lower, upper)


@dataclass(frozen=True)
class TruncationSpectrum:
    n: int
    values: np.ndarray
    vectors: np.ndarray | None = None

    def rows(self):
        """``(index, re, im)`` tuples sorted by real then imaginary part."""
        order = np.lexsort((self.values.imag, self.values.real))
        for i, idx in enumerate(order):
            lam = self.values[idx]
            yield i, float(lam.real), float(lam.imag)


def truncation_spectrum(cell: UnitCell, m: int,
                        want_vectors: bool = False) -> TruncationSpectrum:
    T = truncate(cell, m)
    dec: EigenDecomposition = eigs_tridiagonal(T, want_vectors=want_vectors)
    return TruncationSpectrum(T.n, dec.values, dec.vectors)


def band_separation(curve: SpectralCurve) -> float:
    """Smallest distance between two different branches (``inf`` for ``k = 1``).

    Zero when two bands touch, i.e. when a spectral gap closes.
    """
    best = float("inf")
    for i in range(curve.k):
        for j in range(i + 1, curve.k):
            d = np.min(distance_to_polyline(curve.values[i], curve.values[j]))
            best = min(best, float(d))
    return best


def gap_region(curve: SpectralCurve, gap_index: int = 0,
               inflate: float = 0.1) -> tuple[float, float, float, float]:
    """Rectangle ``(re_min, re_max, im_min, im_max)`` between two bands.

    Bands are ordered by the mean real part of their samples; gap ``i``
    separates band ``i`` from band ``i + 1``.  The box spans the real-part
    gap and the combined imaginary extent of both bands, inflated by
    ``inflate`` of its size.
    """
    if curve.k < 2:
        raise ValueError("a single band has no interior gap")
    if not 0 <= gap_index < curve.k - 1:
        raise ValueError(f"gap_index must lie in [0, {curve.k - 2}]")
    order = np.argsort([br.real.mean() for br in curve.values])
    lo = curve.values[order[gap_index]]
    hi = curve.values[order[gap_index + 1]]
    re0, re1 = float(lo.real.max()), float(hi.real.min())
    if re1 <= re0:
        raise ValueError("bands overlap in real part; supply the search region explicitly")
    im0 = float(min(lo.imag.min(), hi.imag.min()))
    im1 = float(max(lo.imag.max(), hi.imag.max()))
    dre, dim = inflate * (re1 - re0) / 2, inflate * max(im1 - im0, re1 - re0) / 2
    return re0 - dre, re1 + dre, im0 - dim, im1 + dim


def in_region(lam: complex, region: tuple[float, float, float, float]) -> bool:
    re0, re1, im0, im1 = region
    return re0 <= lam.real <= re1 and im0 <= lam.imag <= im1
