"""Edge modes of semi-infinite k-Toeplitz operators.

Candidates are the eigenvalues of ``B0`` (the cell block without its last
site).  Each candidate is certified twice: once through the Floquet
multiplier of its quasi-periodic extension and once through the contour
determinant ``C0``; the two verdicts must agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ConsistencyError, ConvergenceError, DegenerateBlochVectorError, OnGammaError
from .numerics import ClosedContour, contour_integral_mean, directed_hausdorff, quadratic_roots
from .spectra import (
    SpectralCurve,
    band_separation,
    essential_spectrum,
    gamma_set,
    refined_distance,
    truncation_spectrum,
)
from .symbol import (
    UnitCell,
    principal_submatrices,
    symbol_at,
    symbol_stack,
    transfer_matrix,
    viete_data,
)

EDGE_TOL = 1e-8
G0_TOL = 1e-6
COLLISION_TOL = 1e-6


def edge_candidates(cell: UnitCell) -> np.ndarray:
    """Eigenvalues of ``B0``; empty for ``k = 1``."""
    if cell.k == 1:
        return np.zeros(0, dtype=complex)
    B0, _ = principal_submatrices(cell)
    return np.linalg.eigvals(B0)


def floquet_roots(cell: UnitCell, lam: complex) -> tuple[complex, complex]:
    """Both roots of ``z det(f(z) - lam)``, ordered ``|z1| <= |z2|``.

    Computed as reciprocals of the transfer-matrix eigenvalues, whose
    product is known exactly; this avoids forming the degree-``k``
    polynomial ``g(lam)``, which overflows for fine lattices.
    """
    M = transfer_matrix(cell, complex(lam))
    det = complex(np.prod(cell.c / cell.b))
    mu1, mu2 = quadratic_roots(1.0, -(M[0, 0] + M[1, 1]), det)
    return 1.0 / mu2, 1.0 / mu1


def _on_gamma(z1: complex, z2: complex, tol: float) -> bool:
    return abs(abs(z2) - abs(z1)) <= tol * max(abs(z2), 1e-300)


def _kernel_vector(M: np.ndarray) -> tuple[np.ndarray, float]:
    """Right singular vector for the smallest singular value, and that value."""
    _, s, vh = np.linalg.svd(M)
    return np.conj(vh[-1]), float(s[-1])


def _normalize_phase(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    idx = int(np.flatnonzero(np.abs(v) > 1e-12)[0])
    return v * (abs(v[idx]) / v[idx])


@dataclass(frozen=True)
class BlochData:
    vector: np.ndarray
    z: complex


def _bloch_raw(cell: UnitCell, lam: complex, tol: float) -> BlochData:
    if cell.k == 1:
        raise ValueError("B0 is empty for k = 1")
    k = cell.k
    B0, _ = principal_submatrices(cell)
    u, smin = _kernel_vector(B0 - lam * np.eye(k - 1))
    if smin > tol * max(1.0, np.linalg.norm(B0)):
        raise ValueError(f"lam = {lam} is not an eigenvalue of B0 (sigma_min = {smin:.2e})")
    v = _normalize_phase(np.append(u, 0.0))
    denom = cell.c[k - 2] * v[k - 2]
    if abs(v[k - 2]) <= 1e-12:
        raise DegenerateBlochVectorError(
            f"Bloch vector for lam = {lam} has vanishing entry v_(k-1); z is infinite"
        )
    z = complex(-cell.b[k - 1] * v[0] / denom)
    return BlochData(v, z)


def bloch_data(cell: UnitCell, lam: complex, tol: float = EDGE_TOL) -> BlochData:
    """Kernel vector of ``f(z) - lam`` with vanishing last entry, and its multiplier ``z``.

    Raises ``ValueError`` if ``lam`` is not in the spectrum of ``B0``,
    :class:`OnGammaError` if both multipliers have equal modulus and
    :class:`DegenerateBlochVectorError` when ``z`` would be infinite.
    """
    lam = complex(lam)
    z1, z2 = floquet_roots(cell, lam)
    if _on_gamma(z1, z2, 1e-10):
        raise OnGammaError(f"lam = {lam} lies on Gamma")
    data = _bloch_raw(cell, lam, tol)
    res = np.linalg.norm((symbol_at(cell, data.z) - lam * np.eye(cell.k)) @ data.vector)
    scale = max(1.0, np.linalg.norm(symbol_at(cell, data.z)))
    if res > tol * scale:
        raise ConvergenceError(f"Bloch residual {res:.2e} exceeds tolerance")
    return data


def c0_value(cell: UnitCell, lam: complex, samples: int = 1024,
             tol: float = 1e-9, max_samples: int = 1 << 18) -> complex:
    """Determinant of the zeroth Fourier block of ``(f(z) - lam)^{-1}``.

    The block is the mean of the resolvent over the circle ``|z| = sqrt|z1 z2|``,
    which separates the two Floquet multipliers.  The sample count is doubled
    until two successive estimates agree to ``tol``.  Only ``abs`` of the
    result is meaningful for classification; its sign depends on the
    orientation convention.
    """
    lam = complex(lam)
    z1, z2 = floquet_roots(cell, lam)
    if _on_gamma(z1, z2, 1e-9):
        raise OnGammaError(f"lam = {lam} lies on Gamma; the contour meets a pole")
    radius = float(np.sqrt(abs(z1 * z2)))
    eye = np.eye(cell.k)

    def resolvent(nodes: np.ndarray) -> np.ndarray:
        mats = symbol_stack(cell, nodes) - lam * eye
        try:
            return np.linalg.inv(mats)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("symbol is singular on the contour") from exc

    def estimate(n: int) -> complex:
        mean = contour_integral_mean(resolvent, ClosedContour(0.0, radius, n))
        return complex(np.linalg.det(mean))

    n = samples
    prev = estimate(n)
    while n < max_samples:
        n *= 2
        cur = estimate(n)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise ConvergenceError(f"C0 quadrature did not settle with {max_samples} samples")


def _near(points: np.ndarray, target: complex, tol: float) -> bool:
    return bool(points.size) and bool(np.min(np.abs(points - target)) <= tol)


def g0_set(cell: UnitCell, samples: int = 1024, tol: float = G0_TOL,
           gamma_margin: float = 1e-6) -> np.ndarray:
    """Points of ``sigma(B0) u sigma(B1)`` (off Gamma) where ``|C0| < tol``."""
    if cell.k == 1:
        return np.zeros(0, dtype=complex)
    B0, B1 = principal_submatrices(cell)
    cands = np.concatenate([np.linalg.eigvals(B0), np.linalg.eigvals(B1)])
    radius = viete_data(cell).radius
    out: list[complex] = []
    for lam in cands:
        if any(abs(lam - o) <= 1e-10 for o in out):
            continue
        if refined_distance(cell, lam, radius)[0] <= gamma_margin:
            continue
        try:
            c0 = c0_value(cell, lam, samples)
        except OnGammaError:
            continue
        if abs(c0) < tol:
            out.append(complex(lam))
    return np.array(out, dtype=complex)


@dataclass(frozen=True)
class EdgeModeReport:
    lam: complex
    bloch_vector: np.ndarray
    floquet_z: complex
    is_edge: bool
    c0_value: complex
    membership: str
    marginal: bool = False

    @property
    def abs_z(self) -> float:
        return float(abs(self.floquet_z))

    def to_json(self) -> dict:
        z = self.floquet_z
        return {
            "lambda": [self.lam.real, self.lam.imag],
            "z": [z.real, z.imag] if np.isfinite(z) else [float("inf"), 0.0],
            "abs_z": self.abs_z,
            "c0_abs": float(abs(self.c0_value)),
            "is_edge": bool(self.is_edge),
            "membership": self.membership,
        }


def edge_spectrum(cell: UnitCell, samples: int = 1024) -> list[EdgeModeReport]:
    """Certify every ``B0`` eigenvalue as edge or non-edge.

    ``is_edge`` means the quasi-periodic extension decays, ``|z| > 1``.  The
    contour test independently decides whether ``z`` is the larger of the
    two multipliers (``|z| > sqrt|z1 z2|``); for symmetric cells the radius is
    one and both statements coincide.  A disagreement between the contour
    verdict and the multiplier ordering raises :class:`ConsistencyError`.
    """
    if cell.k == 1:
        return []
    _, B1 = principal_submatrices(cell)
    sigma_b1 = np.linalg.eigvals(B1)
    radius = viete_data(cell).radius
    reports = []
    for lam in edge_candidates(cell):
        lam = complex(lam)
        membership = "both" if _near(sigma_b1, lam, EDGE_TOL) else "B0"
        z1, z2 = floquet_roots(cell, lam)
        try:
            data = _bloch_raw(cell, lam, EDGE_TOL)
        except DegenerateBlochVectorError:
            # supported on the first cell only; no multiplier to test
            B0, _ = principal_submatrices(cell)
            u, _ = _kernel_vector(B0 - lam * np.eye(cell.k - 1))
            vec = _normalize_phase(np.append(u, 0.0))
            reports.append(EdgeModeReport(lam, vec, complex(np.inf), False,
                                          complex(np.nan), membership))
            continue
        absz = abs(data.z)
        if _on_gamma(z1, z2, 1e-10):
            reports.append(EdgeModeReport(lam, data.vector, data.z, False,
                                          complex(np.nan), membership, marginal=True))
            continue
        c0 = c0_value(cell, lam, samples)
        larger_root = absz > radius
        if larger_root != (abs(c0) < G0_TOL):
            raise ConsistencyError(
                f"edge criteria disagree at lam = {lam}: |z| = {absz:.6g}, "
                f"radius = {radius:.6g}, |C0| = {abs(c0):.3e}"
            )
        marginal = abs(absz - 1.0) <= EDGE_TOL
        is_edge = (not marginal) and absz > 1.0 + EDGE_TOL
        reports.append(EdgeModeReport(lam, data.vector, data.z, is_edge, c0,
                                      membership, marginal))
    return reports


@dataclass(frozen=True)
class OpenLimitResult:
    gamma: SpectralCurve
    g0_points: np.ndarray

    def distance(self, points) -> np.ndarray:
        """Distance from each point to ``Gamma u G0``."""
        d = self.gamma.distance(points)
        if self.g0_points.size:
            p = np.atleast_1d(np.asarray(points, dtype=complex))
            dg = np.min(np.abs(p[:, None] - self.g0_points[None, :]), axis=1)
            d = np.minimum(d, dg)
        return d

    def sample_points(self) -> np.ndarray:
        return np.concatenate([self.gamma.points(), self.g0_points])


def open_limit(cell: UnitCell, samples: int = 1024) -> OpenLimitResult:
    """The set ``Gamma u G0`` that finite-section spectra accumulate on."""
    return OpenLimitResult(gamma_set(cell, samples), g0_set(cell))


@dataclass(frozen=True)
class OpenLimitDistance:
    n_cells: int
    eig_to_limit: float
    limit_to_eig: float

    @property
    def hausdorff(self) -> float:
        return max(self.eig_to_limit, self.limit_to_eig)


def open_limit_distance(cell: UnitCell, n_cells: int,
                        limit: OpenLimitResult | None = None) -> OpenLimitDistance:
    """Both one-sided distances between ``sigma(T_n)`` and ``Gamma u G0``.

    ``eig_to_limit`` measures how far any eigenvalue strays from the limit
    set; ``limit_to_eig`` measures how well the eigenvalues fill it, which
    is bounded below by the eigenvalue spacing along the curve.
    """
    if limit is None:
        limit = open_limit(cell)
    eigs = truncation_spectrum(cell, n_cells).values
    forward = float(np.max(limit.distance(eigs)))
    backward = directed_hausdorff(limit.sample_points(), eigs)
    return OpenLimitDistance(n_cells, forward, backward)


@dataclass
class HomotopyTrace:
    """Paths of the ``B0`` eigenvalues along a parameter sweep.

    ``gap_margin`` is the smallest distance between two distinct bands of
    the essential spectrum (zero when a gap closes); ``edge_distance`` is
    the distance of each tracked value to the essential spectrum.
    """

    t_grid: np.ndarray
    edge_paths: np.ndarray
    abs_z: np.ndarray
    gap_margin: np.ndarray
    edge_distance: np.ndarray
    collisions: list = field(default_factory=list)

    def rows(self):
        """``(t, path_index, re, im, abs_z, gap_margin)`` tuples in CSV order."""
        for i, t in enumerate(self.t_grid):
            for p in range(self.edge_paths.shape[1]):
                lam = self.edge_paths[i, p]
                yield (float(t), p, float(lam.real), float(lam.imag),
                       float(self.abs_z[i, p]), float(self.gap_margin[i]))


def _multiplier_modulus(cell: UnitCell, lam: complex) -> float:
    try:
        return abs(_bloch_raw(cell, lam, 1e-6).z)
    except DegenerateBlochVectorError:
        return float("inf")


def homotopy_sweep(cell_at: Callable[[float], UnitCell], t_grid: Sequence[float],
                   samples: int = 512) -> HomotopyTrace:
    """Follow each ``B0`` eigenvalue as the cell varies with ``t``."""
    t = np.asarray(t_grid, dtype=float)
    if t.size == 0:
        raise ValueError("empty parameter grid")
    if np.any(np.diff(t) < 0) and np.any(np.diff(t) > 0):
        raise ValueError("t_grid must be monotone")
    paths, absz, margin, dist, collisions = [], [], [], [], []
    prev = None
    for i, ti in enumerate(t):
        cell = cell_at(float(ti))
        cur = edge_candidates(cell)
        if cur.size == 0:
            raise ValueError("k = 1 cells have no edge candidates")
        if cur.size > 1:
            gaps = np.abs(cur[:, None] - cur[None, :])
            collided = bool(np.min(gaps[~np.eye(cur.size, dtype=bool)]) < COLLISION_TOL)
        else:
            collided = False
        if collided:
            collisions.append(i)
            cur = cur[np.lexsort((cur.imag, cur.real))]
            prev = None
        elif prev is not None:
            _, perm = linear_sum_assignment(np.abs(prev[:, None] - cur[None, :]))
            cur = cur[perm]
        else:
            cur = cur[np.lexsort((cur.imag, cur.real))]
        prev = None if collided else cur
        ess = essential_spectrum(cell, samples)
        paths.append(cur)
        absz.append([_multiplier_modulus(cell, lam) for lam in cur])
        margin.append(band_separation(ess))
        dist.append(refined_distance(cell, cur, 1.0, samples))
    return HomotopyTrace(t, np.array(paths), np.array(absz), np.array(margin),
                         np.array(dist), collisions)
