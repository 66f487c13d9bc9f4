"""Minimal static SVG figures (matplotlib, Agg backend)."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams["svg.hashsalt"] = "ktoeplitz"


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_complex_plane(path: str | Path, curves: Sequence[np.ndarray] = (),
                       points: dict | None = None, title: str = "") -> Path:
    """Branches as lines plus labelled point sets, in the complex plane."""
    fig, ax = plt.subplots(figsize=(5, 4))
    for br in curves:
        ax.plot(np.real(br), np.imag(br), "-", color="tab:blue", lw=1)
    markers = ["o", "x", "s", "^", "+"]
    for i, (label, pts) in enumerate((points or {}).items()):
        pts = np.asarray(pts, dtype=complex)
        ax.plot(pts.real, pts.imag, markers[i % len(markers)], ms=4, label=label, ls="none")
    if points:
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_vector(path: str | Path, vector: np.ndarray, title: str = "") -> Path:
    w = np.asarray(vector)
    x = np.arange(w.size) - w.size // 2
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.plot(x, np.real(w), ".-", lw=0.8, label="Re")
    ax.plot(x, np.imag(w), ".-", lw=0.8, label="Im")
    ax.set_xlabel("site offset from interface")
    ax.legend(fontsize=8)
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_lines(path: str | Path, x: np.ndarray, series: dict, xlabel: str = "",
               title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5, 3))
    for label, y in series.items():
        ax.plot(x, y, "-", lw=1, label=label)
    ax.set_xlabel(xlabel)
    ax.legend(fontsize=8)
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_histogram(path: str | Path, values: np.ndarray, reference: float | None = None,
                   title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.hist(np.asarray(values), bins=40, color="tab:blue")
    if reference is not None:
        ax.axvline(reference, color="tab:red", lw=1)
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)
