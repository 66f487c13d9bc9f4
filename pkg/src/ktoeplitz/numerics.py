"""Small numerical kernels shared by the other modules.

Dense eigenproblems go through LAPACK (via numpy/scipy) and every call is
followed by a residual check, so a silently wrong decomposition surfaces as a
:class:`~ktoeplitz.errors.ConvergenceError` instead of a wrong answer.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import ConvergenceError

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Complex tridiagonal matrix stored by diagonals.

    ``upper[i]`` is entry ``(i, i+1)`` and ``lower[i]`` is entry ``(i+1, i)``.
    """

    diag: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        d = np.asarray(self.diag, dtype=complex)
        lo = np.asarray(self.lower, dtype=complex)
        up = np.asarray(self.upper, dtype=complex)
        if d.ndim != 1 or d.size == 0:
            raise ValueError("diagonal must be a non-empty 1-D array")
        if lo.shape != (d.size - 1,) or up.shape != (d.size - 1,):
            raise ValueError(
                f"off-diagonals must have length {d.size - 1}, "
                f"got {lo.shape} and {up.shape}"
            )
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        out = np.diag(self.diag)
        if self.n > 1:
            out += np.diag(self.upper, 1) + np.diag(self.lower, -1)
        return out

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        y = self.diag * x
        y[:-1] += self.upper * x[1:]
        y[1:] += self.lower * x[:-1]
        return y

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.sqrt(np.sum(np.abs(self.diag) ** 2)
                             + np.sum(np.abs(self.lower) ** 2)
                             + np.sum(np.abs(self.upper) ** 2)))

    def is_hermitian(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.diag.imag) <= tol)
                    and np.all(np.abs(self.lower - np.conj(self.upper)) <= tol))


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues with optional unit-norm right eigenvectors (columns)."""

    values: np.ndarray
    vectors: np.ndarray | None = None


@dataclass(frozen=True)
class ClosedContour:
    """Circle ``center + radius * exp(i theta)`` sampled at ``samples`` nodes."""

    center: complex
    radius: float
    samples: int

    def __post_init__(self) -> None:
        if not np.isfinite(self.radius) or self.radius <= 0:
            raise ValueError(f"contour radius must be positive, got {self.radius}")
        if self.samples < 16 or self.samples % 2:
            raise ValueError(f"a contour needs an even sample count >= 16, got {self.samples}")

    def nodes(self) -> np.ndarray:
        theta = 2.0 * np.pi * np.arange(self.samples) / self.samples
        return self.center + self.radius * np.exp(1j * theta)


def _check_residuals(M: np.ndarray, values: np.ndarray, vectors: np.ndarray,
                     tol: float) -> None:
    scale = max(np.linalg.norm(M), 1.0)
    res = np.linalg.norm(M @ vectors - vectors * values, axis=0)
    worst = float(res.max()) if res.size else 0.0
    if not np.isfinite(worst) or worst > tol * scale:
        raise ConvergenceError(
            f"eigenpair residual {worst:.3e} exceeds {tol:.1e} * ||M|| = {tol * scale:.3e}"
        )


def eigs_dense(M: np.ndarray, want_vectors: bool = False,
               tol: float = 1e-10) -> EigenDecomposition:
    """Eigen-decomposition of a general complex matrix with a residual check."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    try:
        w, V = scipy.linalg.eig(M, check_finite=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceError(f"LAPACK eigensolver failed: {exc}") from exc
    V = V / np.linalg.norm(V, axis=0)
    _check_residuals(M, w, V, tol)
    return EigenDecomposition(w, V if want_vectors else None)


def eigs_tridiagonal(T: TridiagonalMatrix, want_vectors: bool = False,
                     tol: float = 1e-10) -> EigenDecomposition:
    """Eigenvalues of a tridiagonal matrix.

    Hermitian input uses the dedicated LAPACK tridiagonal solver; anything
    else falls back to the dense solver.
    """
    if T.n == 1:
        vec = np.ones((1, 1), dtype=complex) if want_vectors else None
        return EigenDecomposition(T.diag.copy(), vec)
    if T.is_hermitian() and np.all(T.upper.imag == 0):
        d = T.diag.real
        e = T.upper.real
        if want_vectors:
            w, V = scipy.linalg.eigh_tridiagonal(d, e)
            w = w.astype(complex)
            V = V.astype(complex)
            _check_residuals(T.to_dense(), w, V, tol)
            return EigenDecomposition(w, V)
        w = scipy.linalg.eigh_tridiagonal(d, e, eigvals_only=True)
        return EigenDecomposition(w.astype(complex), None)
    return eigs_dense(T.to_dense(), want_vectors=want_vectors, tol=tol)


def quadratic_roots(c2: complex, c1: complex, c0: complex) -> tuple[complex, complex]:
    """Roots of ``c2 z^2 + c1 z + c0`` ordered by modulus (ties by argument).

    Uses the cancellation-free form: one root from the larger-magnitude
    branch of the usual formula, the other from Vieta's product.
    """
    c2, c1, c0 = complex(c2), complex(c1), complex(c0)
    if c2 == 0:
        raise ValueError("leading coefficient vanishes; not a quadratic")
    disc = np.sqrt(c1 * c1 - 4.0 * c2 * c0)
    # pick the sign that avoids cancellation in c1 + disc
    if abs(c1 + disc) < abs(c1 - disc):
        disc = -disc
    q = -0.5 * (c1 + disc)
    if q == 0:
        return 0j, 0j
    r1, r2 = q / c2, c0 / q
    pair = sorted((complex(r1), complex(r2)), key=lambda z: (abs(z), np.angle(z)))
    return pair[0], pair[1]


def contour_integral_mean(g: Callable[[np.ndarray], np.ndarray],
                          contour: ClosedContour) -> np.ndarray:
    """Trapezoid approximation of ``(1/2 pi i) * oint g(z) dz / z``.

    ``g`` is called once with the array of nodes and must return an array
    whose leading axis runs over the nodes.  For a circle centred at the
    origin the result is the plain average of ``g``; the rule converges
    geometrically for ``g`` analytic in an annulus around the contour.
    Raises if ``g`` is not finite at some node (a pole on the contour).
    """
    nodes = contour.nodes()
    vals = np.asarray(g(nodes), dtype=complex)
    if vals.shape[:1] != nodes.shape:
        raise ValueError("integrand must return one value per node along axis 0")
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError("integrand is not finite on the contour")
    weight = (nodes - contour.center) / nodes
    weight = weight.reshape((-1,) + (1,) * (vals.ndim - 1))
    return np.sum(vals * weight, axis=0) / contour.samples


def winding_number(samples: np.ndarray, target: complex = 0.0) -> int:
    """Winding number of a closed sampled curve about ``target``.

    The curve is closed by joining the last sample to the first.  Raises if
    consecutive samples turn by more than a quarter turn about the target,
    since the count would then be ambiguous.
    """
    w = np.asarray(samples, dtype=complex) - target
    if w.ndim != 1 or w.size < 3:
        raise ValueError("need at least 3 curve samples")
    if np.any(w == 0):
        raise ValueError("curve passes through the target point")
    steps = np.angle(np.roll(w, -1) / w)
    if np.max(np.abs(steps)) > np.pi / 2:
        raise ValueError("curve is undersampled relative to the target; increase samples")
    total = steps.sum() / (2.0 * np.pi)
    return int(np.rint(total))


def distance_to_polyline(points: np.ndarray, polyline: np.ndarray) -> np.ndarray:
    """Distance from each complex point to a piecewise-linear curve."""
    p = np.atleast_1d(np.asarray(points, dtype=complex))
    line = np.asarray(polyline, dtype=complex)
    if line.size == 1:
        return np.abs(p - line[0])
    a = line[:-1][None, :]
    d = (line[1:] - line[:-1])[None, :]
    dd = np.abs(d) ** 2
    dd = np.where(dd == 0, 1.0, dd)
    t = np.clip(np.real((p[:, None] - a) * np.conj(d)) / dd, 0.0, 1.0)
    return np.min(np.abs(p[:, None] - (a + t * d)), axis=1)


def directed_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """``max_{x in a} min_{y in b} |x - y|`` for finite complex point sets."""
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    if a.size == 0:
        return 0.0
    if b.size == 0:
        return float("inf")
    best = np.full(a.size, np.inf)
    for start in range(0, b.size, 4096):
        chunk = b[start:start + 4096]
        best = np.minimum(best, np.min(np.abs(a[:, None] - chunk[None, :]), axis=1))
    return float(best.max())


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between finite complex point sets."""
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))
