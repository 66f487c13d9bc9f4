"""Chiral interface chains with random couplings and their zero mode.

Each half of the chain reads, from the centre outwards,
``b_0, a_0, b_1, a_1, ..., b_m`` (``2m + 1`` bonds), where the base values
repeat with period ``k'`` and every bond carries its own factor ``1 + u``
with ``u ~ U(-d, d)``.  The total dimension is ``n = 4m + 3``, so the chain
ends on the sublattice that carries the zero mode.  On that sublattice the
zero mode obeys ``z_i = -a_{i-1} z_{i-1} / b_i``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .numerics import TridiagonalMatrix, eigs_dense


@dataclass(frozen=True)
class DisorderConfig:
    base_a: np.ndarray
    base_b: np.ndarray
    d: float
    m: int
    seed: int = 0
    trials: int = 1

    def __post_init__(self) -> None:
        a = np.atleast_1d(np.asarray(self.base_a, dtype=complex))
        b = np.atleast_1d(np.asarray(self.base_b, dtype=complex))
        if a.ndim != 1 or a.shape != b.shape or a.size == 0:
            raise ConfigError("base_a and base_b must be non-empty and of equal length")
        if np.any(a == 0) or np.any(b == 0):
            raise ConfigError("base couplings must be nonzero")
        if not 0 <= self.d < 1:
            raise ConfigError("disorder amplitude d must lie in [0, 1)")
        if int(self.m) != self.m or self.m < 1:
            raise ConfigError("m must be a positive integer")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError("trials must be a positive integer")
        object.__setattr__(self, "base_a", a)
        object.__setattr__(self, "base_b", b)
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "trials", int(self.trials))

    @property
    def period(self) -> int:
        return int(self.base_a.size)

    @property
    def n(self) -> int:
        return 4 * self.m + 3

    @classmethod
    def from_size(cls, base_a, base_b, d: float, n: int, seed: int = 0,
                  trials: int = 1) -> "DisorderConfig":
        """Build from the total dimension ``n`` (must be ``3 mod 4``)."""
        if n < 3 or (n - 3) % 4:
            raise ConfigError(f"n must be of the form 4m + 3, got {n}")
        return cls(base_a, base_b, d, (n - 3) // 4, seed, trials)

    def theoretical_rate(self) -> float:
        """``ln|prod(a) / prod(b)|`` per block of ``k'`` dimers."""
        return float(np.log(abs(np.prod(self.base_a) / np.prod(self.base_b))))


def _rng(cfg: DisorderConfig, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([cfg.seed, trial])))


def _base_bonds(cfg: DisorderConfig) -> np.ndarray:
    """Unperturbed bonds of one half, from the centre outwards."""
    k = cfg.period
    out = np.empty(2 * cfg.m + 1, dtype=complex)
    for j in range(out.size):
        i = j // 2
        out[j] = cfg.base_a[i % k] if j % 2 else cfg.base_b[(i - 1) % k]
    return out


def disordered_bonds(cfg: DisorderConfig, trial: int) -> tuple[np.ndarray, np.ndarray]:
    """``(left, right)`` bonds of one realization, each ordered from the centre out."""
    base = _base_bonds(cfg)
    u = _rng(cfg, trial).uniform(-cfg.d, cfg.d, size=(2, base.size)) if cfg.d > 0 \
        else np.zeros((2, base.size))
    return base * (1.0 + u[0]), base * (1.0 + u[1])


def build_disordered_chain(cfg: DisorderConfig, trial: int = 0) -> TridiagonalMatrix:
    left, right = disordered_bonds(cfg, trial)
    off = np.concatenate([left[::-1], right])
    return TridiagonalMatrix(np.zeros(off.size + 1, dtype=complex), off, off)


@dataclass(frozen=True)
class ZeroMode:
    lam: complex
    vector: np.ndarray
    present: bool


def zero_mode(chain: TridiagonalMatrix, rel_tol: float = 1e-12) -> ZeroMode:
    """Eigenpair closest to zero; ``present`` if ``|lam| <= rel_tol * ||M||``."""
    if np.any(chain.diag != 0):
        raise ValueError("zero_mode expects a chain with vanishing diagonal")
    dec = eigs_dense(chain.to_dense(), want_vectors=True)
    i = int(np.argmin(np.abs(dec.values)))
    lam = complex(dec.values[i])
    return ZeroMode(lam, dec.vectors[:, i], abs(lam) <= rel_tol * chain.norm())


def floquet_process(cfg: DisorderConfig, trial: int = 0,
                    steps: int | None = None) -> np.ndarray:
    """``z_0 = 1, z_i = -a_{i-1} z_{i-1} / b_i`` on the right half; length ``steps + 1``."""
    steps = cfg.m if steps is None else int(steps)
    if not 0 <= steps <= cfg.m:
        raise ValueError(f"steps must lie in [0, {cfg.m}] for this chain")
    _, right = disordered_bonds(cfg, trial)
    a, b = right[1::2], right[0::2]
    z = np.empty(steps + 1, dtype=complex)
    z[0] = 1.0
    for i in range(1, steps + 1):
        z[i] = -a[i - 1] * z[i - 1] / b[i]
    return z


def _slope(y: np.ndarray) -> float:
    x = np.arange(y.size, dtype=float)
    return float(np.polyfit(x, y, 1)[0])


@dataclass(frozen=True)
class DecayStats:
    """Per-trial decay rates per block of ``k'`` dimers.

    ``std`` is the standard error of ``mean``; ``spread`` is the sample
    standard deviation of the individual rates.
    """

    per_trial_rates: np.ndarray
    mean: float
    std: float
    spread: float
    theoretical: float

    def summary(self) -> dict:
        return {"mean": self.mean, "std": self.std, "theoretical": self.theoretical,
                "trials": int(self.per_trial_rates.size)}


def decay_rate_stats(cfg: DisorderConfig) -> DecayStats:
    """Least-squares slope of ``ln|z~_j|`` against ``j`` for each trial."""
    k = cfg.period
    blocks = cfg.m // k
    if blocks < 2:
        raise ConfigError("chain too short: need at least two blocks of k' dimers per side")
    rates = np.empty(cfg.trials)
    for t in range(cfg.trials):
        z = floquet_process(cfg, t)
        rates[t] = _slope(np.log(np.abs(z[: blocks * k + 1: k])))
    spread = float(rates.std(ddof=1)) if rates.size > 1 else 0.0
    return DecayStats(rates, float(rates.mean()), spread / np.sqrt(rates.size), spread,
                      cfg.theoretical_rate())


def eigenvector_decay_fit(vector: np.ndarray, k_block: int = 1, side: str = "right",
                          skip: int = 2) -> float:
    """Decay rate per block of ``k_block`` dimers from a zero-mode envelope.

    The half on ``side`` is split into cells of ``2 k_block`` sites starting
    next to the centre; ``ln max|w|`` per cell is fitted linearly after
    dropping ``skip`` cells at each end.
    """
    w = np.abs(np.asarray(vector))
    n = w.size
    if n % 2 == 0:
        raise ValueError("expected an odd-length vector with a central site")
    c = n // 2
    if side == "right":
        half = w[c + 1:]
    elif side == "left":
        half = w[:c][::-1]
    else:
        raise ValueError("side must be 'left' or 'right'")
    width = 2 * k_block
    cells = half[: (half.size // width) * width].reshape(-1, width)
    env = cells.max(axis=1)[skip: cells.shape[0] - skip]
    if env.size < 2:
        raise ValueError("too few cells left to fit a slope")
    if np.any(env == 0):
        raise ValueError("envelope has exact zeros; the vector is not a chiral zero mode")
    return _slope(np.log(env))
