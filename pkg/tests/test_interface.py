from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ktoeplitz.errors import ConfigError
from ktoeplitz.interface import (
    InterfaceSpec,
    _quasi_periodic,
    assemble_interface,
    classify_parity,
    common_coupling_function,
    common_coupling_match,
    decaying_solution,
    edge_induced_mode,
    impedance_near_edges,
    interface_spectrum,
    matched_function,
    matched_interface_roots,
)
from ktoeplitz.numerics import eigs_tridiagonal
from ktoeplitz.spectra import essential_spectrum, truncate
from ktoeplitz.symbol import make_unit_cell

FIG4A = make_unit_cell([1.2, 2.0], [0.8 - 0.4j, 1.2 - 0.2j])
MATCHED = InterfaceSpec(FIG4A, "shared_site", -2.0, FIG4A.b[1], FIG4A.b[1])
TWO_MODES = InterfaceSpec(make_unit_cell([1.2, 1.0], [1.8 - 0.8j, 3.2 - 1j]),
                          "common_coupling", q=1.0)
EDGE_FREE = InterfaceSpec(make_unit_cell([1.2, 1.0], [1.8 - 0.8j, 0.5 + 1j]),
                          "common_coupling", q=1.0)
SSH = InterfaceSpec(make_unit_cell([0.5, 0.5], [1, 2]), "shared_site", 0.3, 2, 2)


def test_smallest_assembly():
    spec = InterfaceSpec(make_unit_cell([0.7], [1.5]), "shared_site", 0.2, 0.4, 0.9)
    np.testing.assert_allclose(assemble_interface(spec, 1).to_dense(),
                               [[0.7, 0.4, 0], [0.4, 0.2, 0.9], [0, 0.9, 0.7]])


def test_spec_validation():
    with pytest.raises(ConfigError):
        InterfaceSpec(FIG4A, "bogus")
    with pytest.raises(ConfigError):
        InterfaceSpec(FIG4A, "shared_site", eta=np.nan)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 6),
       st.sampled_from(["shared_site", "common_coupling"]))
def test_mirror_symmetry(seed, k, m, kind):
    rng = np.random.default_rng(seed)
    cell = make_unit_cell(rng.normal(size=k) + 1j * rng.normal(size=k),
                          rng.uniform(0.3, 2, k) + 1j * rng.normal(size=k))
    q = complex(rng.normal(), rng.normal())
    M = assemble_interface(InterfaceSpec(cell, kind, 0.4 - 0.1j, q, q), m).to_dense()
    np.testing.assert_array_equal(M, M[::-1, ::-1])
    assert M.shape[0] == 2 * m * k + (kind == "shared_site")


def test_decoupled_interface_is_union_of_halves():
    spec = InterfaceSpec(FIG4A, "shared_site", 0.9 + 0.1j, 0, 0)
    got = interface_spectrum(spec, 6).values
    half = eigs_tridiagonal(truncate(FIG4A, 6)).values
    rev = eigs_tridiagonal(assemble_interface(spec, 6)).values
    want = np.concatenate([half, half, [0.9 + 0.1j]])
    assert got.size == want.size == rev.size
    for lam in want:
        assert np.min(np.abs(got - lam)) < 1e-9
    with pytest.raises(ConfigError):
        matched_interface_roots(spec)


def test_parity_examples():
    assert classify_parity(np.array([1, 0, 1])) == "monopole"
    assert classify_parity(np.array([1, 0, -1])) == "dipole"
    assert classify_parity(np.array([1, 2, 3])) == "none"
    with pytest.raises(ValueError):
        classify_parity(np.zeros(3))


def test_edge_induced_dipole():
    mode = edge_induced_mode(SSH, 100)
    assert mode.lam == pytest.approx(0.5)
    assert mode.parity == "dipole"
    assert abs(mode.vector[mode.vector.size // 2]) == 0
    assert mode.residual < 1e-14


def test_edge_induced_residual_halves_per_cell():
    r10 = edge_induced_mode(SSH, 10).residual
    r20 = edge_induced_mode(SSH, 20).residual
    # |z| = b2 / b1 = 2, so ten more cells buy a factor 2^10
    assert np.log2(r10 / r20) == pytest.approx(10, abs=0.1)


def test_edge_induced_needs_edge():
    spec = InterfaceSpec(make_unit_cell([0.5, 0.5], [2, 1]), "shared_site", 0.3, 1, 1)
    with pytest.raises(ValueError):
        edge_induced_mode(spec, 10)
    with pytest.raises(ConfigError):
        edge_induced_mode(InterfaceSpec(SSH.cell, "shared_site", 0.3, 2, 1), 10)


@pytest.mark.parametrize("lam", [1.5 + 0.05j, 1.9 - 0.1j, 1.3 + 0.2j])
def test_matched_function_equals_centre_residual(lam):
    # build the mode that solves every row but the centre one, then read F off it
    sol = decaying_solution(FIG4A, lam)
    v = sol.v / sol.v[-1]
    m = 30
    u = _quasi_periodic(v, sol.zeta, m)
    t = FIG4A.c[-1] * v[-1] / (sol.zeta * MATCHED.s)
    w = np.concatenate([u[::-1], [t], u])
    r = assemble_interface(MATCHED, m).matvec(w) - lam * w
    c = w.size // 2
    assert r[c] / t == pytest.approx(matched_function(MATCHED, lam), rel=1e-10)
    assert np.abs(np.delete(r, [0, c, w.size - 1])).max() < 1e-10 * np.abs(w).max()


def test_decaying_solution_decays():
    sol = decaying_solution(FIG4A, 1.6)
    assert abs(sol.zeta) < 1
    assert np.linalg.norm(sol.v) == pytest.approx(1.0)


def test_matched_root_and_absence():
    (mode,) = matched_interface_roots(MATCHED)
    assert mode.lam == pytest.approx(1.72298620930 + 0.0330172090j, abs=1e-9)
    assert abs(matched_function(MATCHED, mode.lam)) < 1e-9
    assert mode.truncation_distance < 1e-6
    assert mode.parity == "monopole"
    spec = InterfaceSpec(FIG4A, "shared_site", 1.0, FIG4A.b[1], FIG4A.b[1])
    assert matched_interface_roots(spec) == []


def test_common_coupling_two_modes():
    modes = common_coupling_match(TWO_MODES, m_verify=50)
    assert [md.parity for md in modes] == ["dipole", "monopole"]
    assert modes[0].lam == pytest.approx(0.5483027563 - 0.0712367803j, abs=1e-8)
    assert modes[1].lam == pytest.approx(1.8399159618 + 0.0656907665j, abs=1e-8)
    for md in modes:
        assert md.truncation_distance < 1e-6
        sign = 1 if md.parity == "monopole" else -1
        assert abs(common_coupling_function(TWO_MODES, md.lam, sign)) < 1e-9


def test_common_coupling_ignores_edge_value():
    assert common_coupling_match(EDGE_FREE, m_verify=50) == []


def test_impedance_bounded_near_edges():
    near_a, near_b = impedance_near_edges(MATCHED, [1e-2, 1e-4, 1e-6])
    assert np.all(np.isfinite(near_a)) and np.all(np.isfinite(near_b))
    assert np.abs(near_a).max() < 20 and np.abs(near_b).max() < 20
    # square-root approach to the band edge, not divergence
    assert abs(near_a[-1] - near_a[-2]) < 0.3 and abs(near_b[-1] - near_b[-2]) < 0.3


def test_matched_root_is_in_gap():
    (mode,) = matched_interface_roots(MATCHED)
    assert essential_spectrum(FIG4A, 1024).distance(mode.lam)[0] > 0.1
