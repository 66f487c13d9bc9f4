"""Unit cells of tridiagonal k-Toeplitz operators and their matrix symbols.

A unit cell holds the diagonal ``a``, the super-diagonal couplings ``b`` and
the sub-diagonal couplings ``c``; the last entries ``b[k-1]`` and ``c[k-1]``
couple one cell to the next.  The symbol is the Laurent polynomial

    f(z) = A_{-1} / z + A_0 + A_1 z,

where ``A_0`` is the tridiagonal cell block, ``A_1`` carries ``c_k`` in the
top-right corner and ``A_{-1}`` carries ``b_k`` in the bottom-left corner.
With this convention the quasi-periodic sequence ``(v, v/z, v/z^2, ...)``
solves the Laurent equations exactly when ``(f(z) - lam) v = 0``, so a
multiplier with ``|z| > 1`` describes a mode decaying into the bulk.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ConfigError


def _as_complex_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=complex)
    if arr.ndim != 1:
        raise ConfigError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class UnitCell:
    """One period of a tridiagonal k-Toeplitz operator."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self) -> None:
        a = _as_complex_vector(self.a, "a")
        b = _as_complex_vector(self.b, "b")
        c = _as_complex_vector(self.c, "c")
        if a.size == 0:
            raise ConfigError("a unit cell needs at least one site")
        if b.size != a.size or c.size != a.size:
            raise ConfigError(
                f"a, b and c must all have length k = {a.size}; got {b.size} and {c.size}"
            )
        if np.any(b == 0) or np.any(c == 0):
            raise ConfigError("couplings must be nonzero")
        for arr in (a, b, c):
            arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def k(self) -> int:
        return int(self.a.size)

    @property
    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.b, self.c))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnitCell):
            return NotImplemented
        return (np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b)
                and np.array_equal(self.c, other.c))

    def __repr__(self) -> str:
        return f"UnitCell(a={self.a.tolist()}, b={self.b.tolist()}, c={self.c.tolist()})"

    def shifted(self, shift: int) -> "UnitCell":
        """Same operator viewed from a cell starting ``shift`` sites later."""
        s = shift % self.k
        return UnitCell(np.roll(self.a, -s), np.roll(self.b, -s), np.roll(self.c, -s))


def make_unit_cell(a: Sequence[complex], b: Sequence[complex],
                   c: Sequence[complex] | None = None) -> UnitCell:
    """Build a cell; ``c`` defaults to ``b`` (complex symmetric operator)."""
    return UnitCell(np.asarray(a), np.asarray(b), np.asarray(b if c is None else c))


class SymbolBlocks(NamedTuple):
    a_minus: np.ndarray
    a_zero: np.ndarray
    a_plus: np.ndarray


def cell_block(cell: UnitCell) -> np.ndarray:
    """The tridiagonal ``k x k`` block ``A_0`` (no wrap-around couplings)."""
    k = cell.k
    A0 = np.diag(cell.a).astype(complex)
    if k > 1:
        A0 += np.diag(cell.b[:-1], 1) + np.diag(cell.c[:-1], -1)
    return A0


def symbol_blocks(cell: UnitCell) -> SymbolBlocks:
    k = cell.k
    Am = np.zeros((k, k), dtype=complex)
    Ap = np.zeros((k, k), dtype=complex)
    Am[k - 1, 0] = cell.b[k - 1]
    Ap[0, k - 1] = cell.c[k - 1]
    return SymbolBlocks(Am, cell_block(cell), Ap)


def symbol_at(cell: UnitCell, z: complex) -> np.ndarray:
    """Evaluate ``f(z)``; raises on ``z = 0``."""
    z = complex(z)
    if z == 0:
        raise ValueError("the symbol has a pole at z = 0")
    f = cell_block(cell)
    k = cell.k
    f[0, k - 1] += cell.c[k - 1] * z
    f[k - 1, 0] += cell.b[k - 1] / z
    return f


def symbol_stack(cell: UnitCell, z: np.ndarray) -> np.ndarray:
    """``f(z)`` for an array of nonzero ``z``, stacked along the first axis."""
    z = np.asarray(z, dtype=complex).ravel()
    if np.any(z == 0):
        raise ValueError("the symbol has a pole at z = 0")
    k = cell.k
    f = np.broadcast_to(cell_block(cell), (z.size, k, k)).copy()
    f[:, 0, k - 1] += cell.c[k - 1] * z
    f[:, k - 1, 0] += cell.b[k - 1] / z
    return f


def principal_submatrices(cell: UnitCell) -> tuple[np.ndarray, np.ndarray]:
    """``(B0, B1)``: ``A_0`` with its last, respectively first, row and column removed."""
    A0 = cell_block(cell)
    return A0[:-1, :-1], A0[1:, 1:]


def _tridiag_det(diag: np.ndarray, upper: np.ndarray, lower: np.ndarray) -> complex:
    """Continuant recurrence for a tridiagonal determinant."""
    prev, cur = 1.0 + 0j, 1.0 + 0j
    for i, d in enumerate(diag):
        if i == 0:
            prev, cur = cur, d
        else:
            prev, cur = cur, d * cur - upper[i - 1] * lower[i - 1] * prev
    return complex(cur)


def p_poly(cell: UnitCell, lam: complex) -> complex:
    """Determinant of the interior block (sites 2..k-1) minus ``lam``.

    Empty for ``k = 2`` (value 1); ``k = 1`` has no interior and returns 0.
    """
    k = cell.k
    if k == 1:
        return 0j
    inner = slice(1, k - 1)
    return _tridiag_det(cell.a[inner] - lam, cell.b[1:k - 2], cell.c[1:k - 2])


def g_poly(cell: UnitCell, lam: complex) -> complex:
    """Middle coefficient of ``z det(f(z) - lam)``.

    ``det(A_0 - lam) - b_k c_k p(lam)`` for ``k >= 2`` and ``a - lam`` for ``k = 1``.
    """
    if cell.k == 1:
        return complex(cell.a[0] - lam)
    det0 = _tridiag_det(cell.a - lam, cell.b[:-1], cell.c[:-1])
    return complex(det0 - cell.b[-1] * cell.c[-1] * p_poly(cell, lam))


def det_coefficients(cell: UnitCell, lam: complex) -> tuple[complex, complex, complex]:
    """Coefficients ``(c2, c1, c0)`` with ``z det(f(z) - lam) = c2 z^2 + c1 z + c0``."""
    sign = (-1) ** (cell.k + 1)
    return (complex(sign * np.prod(cell.c)), g_poly(cell, lam),
            complex(sign * np.prod(cell.b)))


def coupling_product(cell: UnitCell) -> complex:
    """``A = (-1)^k prod(b)``, so that ``det(f(e^{-i alpha}) - lam) = g(lam) - 2 A cos(alpha)``
    for a symmetric cell."""
    return complex((-1) ** cell.k * np.prod(cell.b))


def transfer_matrix(cell: UnitCell, lam: complex) -> np.ndarray:
    """One-cell transfer matrix of ``(T - lam) u = 0``.

    Maps ``(u_1, u_0)`` to ``(u_{k+1}, u_k)``, where ``u_0`` is the last
    site of the previous cell.  Its eigenvalues are ``1/z`` for the two
    Floquet multipliers ``z``; each factor is normalised by a coupling, so the
    product stays representable even when ``det(f(z) - lam)`` overflows.
    """
    lam = complex(lam)
    k = cell.k
    M = np.eye(2, dtype=complex)
    for i in range(k):
        prev_c = cell.c[i - 1]          # c_k couples site 1 back to the previous cell
        step = np.array([[-(cell.a[i] - lam) / cell.b[i], -prev_c / cell.b[i]],
                         [1.0, 0.0]])
        M = step @ M
    return M


class VieteData(NamedTuple):
    """``a_prod = (-1)^k prod(b)``, ``z_product = z1 z2`` and ``radius = sqrt|z1 z2|``."""

    a_prod: complex
    z_product: complex
    radius: float


def viete_data(cell: UnitCell) -> VieteData:
    """Viete relations of the two Floquet multipliers; independent of ``lam``."""
    prod = complex(np.prod(cell.b) / np.prod(cell.c))
    radius = 1.0 if cell.is_symmetric else float(np.sqrt(abs(prod)))
    return VieteData(coupling_product(cell), prod, radius)


def symmetrize(cell: UnitCell) -> tuple[UnitCell, np.ndarray]:
    """Symmetric cell with ``b' = c' = sqrt(b c)`` (principal branch).

    Also returns the bond ratios ``rho_i = d_{i+1} / d_i`` of the diagonal
    similarity ``D^{-1} T D`` that maps the truncations of ``cell`` onto
    those of the result.  Symmetric cells give ``rho = 1``.
    """
    s = np.where(cell.b == cell.c, cell.b, np.sqrt(cell.b * cell.c))
    rho = s / cell.b
    return UnitCell(cell.a.copy(), s, s.copy()), rho
