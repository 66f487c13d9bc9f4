from __future__ import annotations

import numpy as np
import pytest

from ktoeplitz.errors import ConfigError
from ktoeplitz.fdm import (
    FdmConfig,
    assemble_fdm_cell,
    b0_convergence,
    band_intervals,
    first_gap,
    gap_fraction_grid,
    impedance_curve,
    interface_at_resonator,
    node_permittivity,
)
from ktoeplitz.spectra import essential_spectrum
from ktoeplitz.symbol import principal_submatrices, symbol_at


def test_homogeneous_dispersion():
    cfg = FdmConfig(16, eps_outside=2.0, mu0=1.5, intervals=())
    cell = assemble_fdm_cell(cfg)
    for alpha in (0.0, 0.3, 2.0, np.pi):
        got = np.sort(np.linalg.eigvalsh(symbol_at(cell, np.exp(1j * alpha))))
        theta = (alpha + 2 * np.pi * np.arange(cfg.k)) / cfg.k
        want = np.sort((2 - 2 * np.cos(theta)) / (cfg.mu0 * 2.0 * cfg.dx ** 2))
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12 * want.max())
    with pytest.raises(ValueError):
        first_gap(cfg)


def test_homogeneous_b0_interlaces():
    cfg = FdmConfig(12, intervals=())
    rows = b0_convergence(cfg, [12], n_track=5)
    assert max(r[3] for r in rows) < 1e-9


def test_dimer_cell_is_real_symmetric_and_persymmetric():
    cell = assemble_fdm_cell(FdmConfig(20))
    assert cell.is_symmetric and np.all(cell.a.imag == 0)
    np.testing.assert_allclose(cell.a, cell.a[::-1], rtol=1e-12)
    np.testing.assert_allclose(cell.b[:-1], cell.b[:-1][::-1], rtol=1e-12)


def test_permittivity_and_validation():
    eps = node_permittivity(FdmConfig(20))
    assert eps.sum() == pytest.approx(10 * 10 + 10 * 1)
    with pytest.raises(ConfigError):
        FdmConfig(2)
    with pytest.raises(ConfigError):
        FdmConfig(10, intervals=((0.1, 0.5), (0.4, 0.8)))


def test_band_intervals_match_sampled_spectrum():
    cell = assemble_fdm_cell(FdmConfig(10))
    bands = band_intervals(cell)
    pts = essential_spectrum(cell, 2001).values.real
    np.testing.assert_allclose(np.sort(pts.min(axis=1)), bands[:, 0], rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(np.sort(pts.max(axis=1)), bands[:, 1], rtol=1e-9, atol=1e-9)


def test_k20_b0_values_sit_in_gaps():
    cell = assemble_fdm_cell(FdmConfig(20))
    bands = band_intervals(cell)
    b0 = np.linalg.eigvalsh(principal_submatrices(cell)[0].real)[:3]
    for v in b0:
        assert not np.any((bands[:, 0] < v) & (v < bands[:, 1]))


def test_b0_convergence_trend():
    rows = b0_convergence(FdmConfig(10), [10, 20, 40, 80])
    worst = [max(r[3] for r in rows if r[0] == k) for k in (10, 20, 40, 80)]
    assert all(x > y for x, y in zip(worst, worst[1:]))
    with pytest.raises(ValueError):
        b0_convergence(FdmConfig(10), [20, 10])


def test_band_edges_converge_at_second_order():
    edges = [band_intervals(assemble_fdm_cell(FdmConfig(k, intervals=((0.25, 0.75),))))[0, 1]
             for k in (20, 40, 80)]
    ratio = (edges[0] - edges[1]) / (edges[1] - edges[2])
    assert ratio > 2.5


def test_interface_centre():
    cfg = FdmConfig(20)
    spec = interface_at_resonator(cfg)
    cell = assemble_fdm_cell(cfg)
    assert spec.eta == pytest.approx(cell.a[6]) and spec.q == spec.s


def test_impedance_diverges_toward_edges():
    cfg = FdmConfig(40)
    grid = gap_fraction_grid(cfg, [0.001, 0.01, 0.1, 0.5, 0.9, 0.99, 0.999])
    re_f = np.array([r[1] for r in impedance_curve(cfg, grid)])
    assert np.all(np.abs([r[2] for r in impedance_curve(cfg, grid)]) < 1e-9)
    assert re_f[0] > re_f[1] > re_f[2] and re_f[-1] < re_f[-2] < re_f[-3]
    assert re_f[0] > 0 > re_f[-1]
    with pytest.raises(ValueError):
        impedance_curve(cfg, [0.0])


def test_impedance_grows_with_k_at_fixed_fraction():
    vals = []
    for k in (10, 20, 40, 80):
        cfg = FdmConfig(k)
        vals.append(impedance_curve(cfg, gap_fraction_grid(cfg, [0.001]))[0][1])
    assert all(x < y for x, y in zip(vals, vals[1:]))
