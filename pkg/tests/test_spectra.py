from __future__ import annotations

import numpy as np
import pytest

from ktoeplitz.numerics import directed_hausdorff
from ktoeplitz.spectra import (
    band_separation,
    essential_spectrum,
    gamma_set,
    gap_region,
    in_region,
    refined_distance,
    truncate,
    truncation_spectrum,
    winding_region_membership,
)
from ktoeplitz.symbol import make_unit_cell, symmetrize

FIG4A = make_unit_cell([1.2, 2.0], [0.8 - 0.4j, 1.2 - 0.2j])


def test_laplacian_segment():
    curve = essential_spectrum(make_unit_cell([0.0], [1.0]), 257)
    pts = curve.points()
    assert np.abs(pts.imag).max() < 1e-14
    assert pts.real.min() == pytest.approx(-2) and pts.real.max() == pytest.approx(2)
    assert band_separation(curve) == float("inf")


def test_hermitian_dimer_bands():
    curve = essential_spectrum(make_unit_cell([0, 0], [1, 2]), 512)
    pts = curve.points()
    # +-|1 + 2 e^{i alpha}| sweeps [-3, -1] and [1, 3]
    assert np.all((np.abs(pts.real) >= 1 - 1e-12) & (np.abs(pts.real) <= 3 + 1e-12))
    assert band_separation(curve) == pytest.approx(2.0, abs=1e-4)
    lo, hi, _, _ = gap_region(curve, inflate=0.0)
    assert lo == pytest.approx(-1, abs=1e-4) and hi == pytest.approx(1, abs=1e-4)


def test_branch_rows_and_closure():
    curve = essential_spectrum(FIG4A, 64)
    rows = list(curve.rows())
    assert len(rows) == 128 and rows[0][:2] == (-np.pi, 0) and rows[1][1] == 1
    # alpha = -pi and alpha = pi give the same symbol, so the branches close
    np.testing.assert_allclose(np.sort_complex(curve.values[:, 0]),
                               np.sort_complex(curve.values[:, -1]), atol=1e-12)


def test_gamma_equals_essential_for_symmetric():
    a = essential_spectrum(FIG4A, 128).values
    b = gamma_set(FIG4A, 128).values
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_gamma_matches_symmetrized_cell():
    cell = make_unit_cell([0.0, 0.0], [2, 2], [1, 1])
    gam = gamma_set(cell, 512)
    ess = essential_spectrum(symmetrize(cell)[0], 512)
    assert gam.radius == pytest.approx(2.0)
    assert max(directed_hausdorff(gam.points(), ess.points()),
               directed_hausdorff(ess.points(), gam.points())) < 2e-2
    assert np.max(ess.distance(gam.points())) < 1e-10


def test_scalar_nonsymmetric_gamma_segment():
    pts = gamma_set(make_unit_cell([0.0], [4.0], [1.0]), 401).points()
    assert np.abs(pts.imag).max() < 1e-12
    assert pts.real.min() == pytest.approx(-4) and pts.real.max() == pytest.approx(4)


def test_winding_membership():
    assert winding_region_membership(FIG4A, 1.6) == 0
    assert abs(winding_region_membership(make_unit_cell([0.0], [2.0], [0.5]), 0.0)) == 1
    assert winding_region_membership(make_unit_cell([0.0], [2.0], [0.5]), 10.0) == 0
    with pytest.raises(ValueError):
        winding_region_membership(make_unit_cell([0.0], [1.0]), 0.5)


def test_truncate_examples():
    T = truncate(FIG4A, 1).to_dense()
    np.testing.assert_allclose(T, [[1.2, 0.8 - 0.4j], [0.8 - 0.4j, 2.0]])
    np.testing.assert_allclose(truncate(make_unit_cell([0], [1]), 2).to_dense(), [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        truncate(FIG4A, 0)


def test_truncation_clusters_on_bands():
    cell = make_unit_cell([0, 0], [1, 2])
    spec = truncation_spectrum(cell, 20)
    ess = essential_spectrum(cell, 1024)
    d = ess.distance(spec.values)
    # the two end modes at 0 aside, everything sits on the bands
    assert np.sort(d)[-3] < 1e-2
    assert np.sum(np.abs(spec.values) < 1e-5) == 2  # split by ~2^-20
    rows = list(spec.rows())
    assert [r[0] for r in rows] == list(range(40))
    assert all(rows[i][1] <= rows[i + 1][1] for i in range(39))


def test_refined_distance_beats_polyline():
    curve = essential_spectrum(FIG4A, 32)
    probe = curve.values[0, 3] * 0.5 + curve.values[0, 4] * 0.5 + 0.1j
    fine = refined_distance(FIG4A, probe, 1.0, 32)[0]
    dense = essential_spectrum(FIG4A, 20000).distance(probe)[0]
    assert fine == pytest.approx(dense, abs=1e-7)


def test_in_region():
    assert in_region(1 + 1j, (0, 2, 0, 2))
    assert not in_region(3 + 0j, (0, 2, 0, 2))
