"""Interface operators built from a k-Toeplitz block and its mirror image.

Two geometries are supported.  ``shared_site`` places one extra site with
on-site value ``eta`` between the mirrored left half and the right half,
coupled by ``q`` (left) and ``s`` (right).  ``common_coupling`` joins the
two halves directly by a single coupling ``q``.

Interface eigenvalues come in two kinds: edge-induced ones, inherited from
edge modes of the half-infinite block, and matched ones, which are zeros of
a scalar impedance-like function built from the decaying Floquet solution.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .edge import edge_spectrum, floquet_roots
from .errors import ConfigError, ConvergenceError, DegenerateBlochVectorError, OnGammaError
from .numerics import EPS, TridiagonalMatrix, eigs_tridiagonal, distance_to_polyline
from .spectra import (
    SpectralCurve,
    TruncationSpectrum,
    essential_spectrum,
    gap_region,
    in_region,
    truncate,
)
from .symbol import UnitCell, transfer_matrix

KINDS = ("shared_site", "common_coupling")
Region = tuple[float, float, float, float]


@dataclass(frozen=True)
class InterfaceSpec:
    """Mirror-symmetric interface; ``eta`` and ``s`` are ignored for ``common_coupling``."""

    cell: UnitCell
    kind: str
    eta: complex = 0j
    q: complex = 1.0 + 0j
    s: complex = 1.0 + 0j

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown interface kind {self.kind!r}; expected one of {KINDS}")
        for name in ("eta", "q", "s"):
            val = complex(getattr(self, name))
            if not np.isfinite(val):
                raise ConfigError(f"{name} must be finite")
            object.__setattr__(self, name, val)

    @property
    def decoupled(self) -> bool:
        """True if a coupling vanishes; such specs are only good for assembly."""
        return self.q == 0 or (self.kind == "shared_site" and self.s == 0)


@dataclass(frozen=True)
class InterfaceMode:
    lam: complex
    vector: np.ndarray
    parity: str
    origin: str
    residual: float
    truncation_distance: float = float("nan")


def assemble_interface(spec: InterfaceSpec, m: int) -> TridiagonalMatrix:
    """Finite interface matrix with ``m`` cells on each side.

    Dimension ``2 m k + 1`` for a shared site and ``2 m k`` otherwise.
    """
    T = truncate(spec.cell, m)
    d, up, lo = T.diag, T.upper, T.lower
    if spec.kind == "shared_site":
        diag = np.concatenate([d[::-1], [spec.eta], d])
        upper = np.concatenate([lo[::-1], [spec.q, spec.s], up])
        lower = np.concatenate([up[::-1], [spec.q, spec.s], lo])
    else:
        diag = np.concatenate([d[::-1], d])
        upper = np.concatenate([lo[::-1], [spec.q], up])
        lower = np.concatenate([up[::-1], [spec.q], lo])
    return TridiagonalMatrix(diag, lower, upper)


def interface_spectrum(spec: InterfaceSpec, m: int,
                       want_vectors: bool = False) -> TruncationSpectrum:
    M = assemble_interface(spec, m)
    dec = eigs_tridiagonal(M, want_vectors=want_vectors)
    return TruncationSpectrum(M.n, dec.values, dec.vectors)


def classify_parity(w: np.ndarray, tol: float = 1e-6) -> str:
    """``monopole`` if ``w`` is even under reversal, ``dipole`` if odd, else ``none``."""
    w = np.asarray(w, dtype=complex)
    nrm = np.linalg.norm(w)
    if nrm == 0:
        raise ValueError("zero vector has no parity")
    w = w / nrm
    if np.linalg.norm(w - w[::-1]) <= tol:
        return "monopole"
    if np.linalg.norm(w + w[::-1]) <= tol:
        return "dipole"
    return "none"


def _residual(M: TridiagonalMatrix, lam: complex, w: np.ndarray) -> float:
    return float(np.linalg.norm(M.matvec(w) - lam * w) / np.linalg.norm(w))


def _quasi_periodic(v: np.ndarray, ratio: complex, m: int) -> np.ndarray:
    """``(v, ratio v, ratio^2 v, ...)`` over ``m`` cells."""
    return np.concatenate([v * ratio ** j for j in range(m)])


def edge_induced_mode(spec: InterfaceSpec, m: int,
                      lam: complex | None = None) -> InterfaceMode:
    """Odd interface mode built from an edge mode of the right half.

    The right half carries the decaying edge solution, the shared site is
    zero and the left half is its negated mirror image, which is an exact
    eigenvector up to the truncation error at the outer ends.
    """
    if spec.kind != "shared_site":
        raise ConfigError("edge-induced modes need a shared interface site")
    if spec.q != spec.s or spec.decoupled:
        raise ConfigError("edge-induced modes need q == s != 0")
    edges = [r for r in edge_spectrum(spec.cell) if r.is_edge]
    if not edges:
        raise ValueError("the cell has no edge mode")
    if lam is None:
        rep = edges[0]
    else:
        rep = min(edges, key=lambda r: abs(r.lam - lam))
    u = _quasi_periodic(rep.bloch_vector, 1.0 / rep.floquet_z, m)
    w = np.concatenate([-u[::-1], [0.0], u])
    w = w / np.linalg.norm(w)
    M = assemble_interface(spec, m)
    res = _residual(M, rep.lam, w)
    bound = 10.0 * abs(rep.floquet_z) ** (-m) * max(1.0, abs(spec.cell.b[-1]))
    floor = 100.0 * EPS * M.norm()
    if res > max(bound, floor):
        limit = max(bound, floor)
        raise ConvergenceError(f"edge-induced mode residual {res:.3e} exceeds {limit:.3e}")
    return InterfaceMode(rep.lam, w, classify_parity(w), "edge_induced", res)


@dataclass(frozen=True)
class DecayingSolution:
    """Floquet data of the solution decaying into the right half.

    ``zeta`` is the per-cell ratio (``|zeta| < 1``) and ``v`` the cell vector.
    """

    zeta: complex
    v: np.ndarray


def decaying_solution(cell: UnitCell, lam: complex) -> DecayingSolution:
    """Solution of ``(T - lam) u = 0`` decaying to the right, one cell of it.

    The cell vector is propagated through the three-term recursion from the
    transfer-matrix eigenvector, which is stable for long cells.
    """
    lam = complex(lam)
    z1, z2 = floquet_roots(cell, lam)
    if abs(abs(z2) - abs(z1)) <= 1e-10 * abs(z2):
        raise OnGammaError(f"lam = {lam} lies on Gamma; no decaying branch")
    mu = 1.0 / z2
    M = transfer_matrix(cell, lam)
    cand = (np.array([M[0, 1], mu - M[0, 0]]), np.array([mu - M[1, 1], M[1, 0]]))
    start = max(cand, key=np.linalg.norm)
    if np.linalg.norm(start) == 0:
        start = np.array([1.0, 0.0]) if abs(M[1, 0]) == 0 else np.array([0.0, 1.0])
    u_prev, u = start[1], start[0]          # (u_0, u_1)
    v = np.empty(cell.k, dtype=complex)
    for i in range(cell.k):
        v[i] = u
        u_prev, u = u, -((cell.a[i] - lam) * u + cell.c[i - 1] * u_prev) / cell.b[i]
    return DecayingSolution(mu, v / np.linalg.norm(v))


def matched_function(spec: InterfaceSpec, lam: complex) -> complex:
    """Scalar function whose zeros are the matched interface eigenvalues.

    ``F(lam) = eta - lam + (q^2 + s^2) zeta v_1 / (c_k v_k)`` with ``(zeta, v)``
    the decaying solution.  Raises :class:`DegenerateBlochVectorError` when
    ``v_k`` vanishes (then ``lam`` is an edge-type point).
    """
    if spec.kind != "shared_site":
        raise ConfigError("matched_function applies to shared-site interfaces")
    sol = decaying_solution(spec.cell, lam)
    vk = sol.v[-1]
    if abs(vk) <= 1e-10 * np.linalg.norm(sol.v):
        raise DegenerateBlochVectorError(f"v_k vanishes at lam = {lam}")
    ratio = sol.v[0] / (spec.cell.c[-1] * vk)
    return complex(spec.eta - lam + (spec.q ** 2 + spec.s ** 2) * sol.zeta * ratio)


def common_coupling_function(spec: InterfaceSpec, lam: complex, sign: int) -> complex:
    """``sign q + a_1 - lam + b_1 u_2 / u_1`` on the decaying solution.

    Zeros with ``sign = +1`` give even (monopole) modes and ``sign = -1``
    odd (dipole) modes of the common-coupling interface.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    cell = spec.cell
    sol = decaying_solution(cell, lam)
    v1 = sol.v[0]
    if abs(v1) <= 1e-10 * np.linalg.norm(sol.v):
        raise DegenerateBlochVectorError(f"v_1 vanishes at lam = {lam}")
    u2 = sol.v[1] if cell.k > 1 else sol.zeta * v1
    return complex(sign * spec.q + cell.a[0] - complex(lam) + cell.b[0] * u2 / v1)


def default_region(cell: UnitCell, samples: int = 512) -> Region:
    """First spectral gap box if it exists, else the essential-spectrum bounding box."""
    ess = essential_spectrum(cell, samples)
    if cell.k > 1:
        try:
            return gap_region(ess, 0)
        except ValueError:
            pass
    pts = ess.points()
    re0, re1, im0, im1 = pts.real.min(), pts.real.max(), pts.imag.min(), pts.imag.max()
    pad = 0.05 * max(re1 - re0, im1 - im0, 1.0)
    return float(re0 - pad), float(re1 + pad), float(im0 - pad), float(im1 + pad)


def _newton(func: Callable[[complex], complex], seed: complex, radius: float,
            max_iter: int = 60) -> complex | None:
    """Complex Newton iteration with a central-difference derivative.

    Gives up (returns ``None``) once the iterate wanders farther than
    ``radius`` from the seed.
    """
    lam = complex(seed)
    for _ in range(max_iter):
        if abs(lam - seed) > radius:
            return None
        val = func(lam)
        h = 1e-7 * (1.0 + abs(lam))
        deriv = (func(lam + h) - func(lam - h)) / (2 * h)
        if deriv == 0 or not np.isfinite(deriv):
            return None
        step = val / deriv
        if abs(step) > 1.0 + abs(lam):
            step *= (1.0 + abs(lam)) / abs(step)
        lam -= step
        if abs(step) <= 1e-14 * (1.0 + abs(lam)):
            return lam
    return lam


def find_roots(func: Callable[[complex], complex], region: Region, grid: int = 20,
               ess: SpectralCurve | None = None, gamma_margin: float = 1e-3,
               tol: float = 1e-9) -> list[complex]:
    """Zeros of an analytic function inside a rectangle by seeded Newton iterations.

    Seeds lie on a ``grid x grid`` lattice.  Converged points outside the
    region, within ``gamma_margin`` of ``ess`` or with ``|func| > tol`` are
    dropped, and duplicates closer than ``1e-7`` are merged.
    """
    re0, re1, im0, im1 = region
    radius = 2.0 * float(np.hypot(re1 - re0, im1 - im0)) + 1e-12
    found: list[complex] = []

    def safe(lam: complex) -> complex:
        try:
            return func(lam)
        except (DegenerateBlochVectorError, OnGammaError):
            return complex(np.nan)

    for x in np.linspace(re0, re1, grid):
        for y in np.linspace(im0, im1, grid):
            with np.errstate(all="ignore"):
                root = _newton(safe, complex(x, y), radius)
            if root is None or not np.isfinite(root):
                continue
            if not in_region(root, region):
                continue
            val = safe(root)
            if not np.isfinite(val) or abs(val) > tol:
                continue
            if ess is not None and np.min([distance_to_polyline(root, br)[0]
                                           for br in ess.values]) <= gamma_margin:
                continue
            if any(abs(root - r) <= 1e-7 * (1 + abs(r)) for r in found):
                continue
            found.append(root)
    return sorted(found, key=lambda z: (z.real, z.imag))


def _verify(M: TridiagonalMatrix, lam: complex, w: np.ndarray,
            eigs: np.ndarray) -> tuple[float, float]:
    return _residual(M, lam, w), float(np.min(np.abs(eigs - lam)))


def matched_interface_roots(spec: InterfaceSpec, region: Region | None = None,
                            grid: int = 20, m_verify: int = 100,
                            samples: int = 1024) -> list[InterfaceMode]:
    """Matched interface eigenvalues of a shared-site interface.

    Every root is checked against the finite interface matrix with
    ``m_verify`` cells per side: the reconstructed mode's residual and the
    distance to the nearest eigenvalue are stored on the result.
    """
    if spec.kind != "shared_site":
        raise ConfigError("use common_coupling_match for common-coupling interfaces")
    if spec.decoupled:
        raise ConfigError("interface couplings must be nonzero to match modes")
    ess = essential_spectrum(spec.cell, samples)
    if region is None:
        region = default_region(spec.cell)
    roots = find_roots(lambda lam: matched_function(spec, lam), region, grid, ess)
    M = assemble_interface(spec, m_verify)
    eigs = eigs_tridiagonal(M).values
    modes = []
    for lam in roots:
        sol = decaying_solution(spec.cell, lam)
        v = sol.v / sol.v[-1]
        u = _quasi_periodic(v, sol.zeta, m_verify)
        centre = spec.cell.c[-1] * v[-1] / (sol.zeta * spec.s)
        w = np.concatenate([(spec.q / spec.s) * u[::-1], [centre], u])
        res, dist = _verify(M, lam, w, eigs)
        modes.append(InterfaceMode(lam, w / np.linalg.norm(w), classify_parity(w),
                                   "matched", res, dist))
    return modes


def common_coupling_match(spec: InterfaceSpec, region: Region | None = None,
                          grid: int = 20, m_verify: int = 100,
                          samples: int = 1024) -> list[InterfaceMode]:
    """Interface eigenvalues of a common-coupling interface, both parities."""
    if spec.kind != "common_coupling":
        raise ConfigError("common_coupling_match needs a common-coupling interface")
    if spec.decoupled:
        raise ConfigError("interface coupling must be nonzero to match modes")
    ess = essential_spectrum(spec.cell, samples)
    if region is None:
        region = default_region(spec.cell)
    M = assemble_interface(spec, m_verify)
    eigs = eigs_tridiagonal(M).values
    modes = []
    for sign in (1, -1):
        roots = find_roots(lambda lam: common_coupling_function(spec, lam, sign),
                           region, grid, ess)
        for lam in roots:
            sol = decaying_solution(spec.cell, lam)
            u = _quasi_periodic(sol.v / sol.v[0], sol.zeta, m_verify)
            w = np.concatenate([sign * u[::-1], u])
            res, dist = _verify(M, lam, w, eigs)
            modes.append(InterfaceMode(lam, w / np.linalg.norm(w), classify_parity(w),
                                       "matched", res, dist))
    return sorted(modes, key=lambda md: (md.lam.real, md.lam.imag))


def gap_edge_points(cell: UnitCell, gap_index: int = 0,
                    samples: int = 2048) -> tuple[complex, complex]:
    """Closest pair of points on the two bands bounding a spectral gap.

    Bands are ordered by mean real part, as in :func:`ktoeplitz.spectra.gap_region`.
    """
    ess = essential_spectrum(cell, samples)
    if ess.k < 2:
        raise ValueError("a single band has no gap")
    order = np.argsort([br.real.mean() for br in ess.values])
    lo, hi = ess.values[order[gap_index]], ess.values[order[gap_index + 1]]
    dist = np.abs(lo[:, None] - hi[None, :])
    i, j = np.unravel_index(np.argmin(dist), dist.shape)
    return complex(lo[i]), complex(hi[j])


def impedance_near_edges(spec: InterfaceSpec, fractions: Sequence[float],
                         gap_index: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """``F`` evaluated at ``A + f (B - A)`` and ``B + f (A - B)`` for each fraction ``f``.

    ``A`` and ``B`` are the gap edge points; small fractions probe the
    behaviour as the spectral parameter approaches the bands.
    """
    A, B = gap_edge_points(spec.cell, gap_index)
    f = np.asarray(fractions, dtype=float)
    near_a = np.array([matched_function(spec, A + x * (B - A)) for x in f])
    near_b = np.array([matched_function(spec, B + x * (A - B)) for x in f])
    return near_a, near_b
