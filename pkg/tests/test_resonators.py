from __future__ import annotations

import numpy as np
import pytest

from ktoeplitz.errors import ConfigError
from ktoeplitz.interface import assemble_interface, classify_parity
from ktoeplitz.numerics import eigs_dense
from ktoeplitz.resonators import (
    ResonatorChain,
    bulk_cell,
    capacitance_matrix,
    gap_eigenvalues,
    generalized_capacitance,
    interface_spec,
    resonances,
    robustness_sweep,
    with_interface_spacing,
)

V = np.exp(-1j)


def test_hand_assembled_five_resonators():
    C = capacitance_matrix(ResonatorChain(1, 1.0, 2.0)).to_dense()
    want = np.array([[1, -1, 0, 0, 0],
                     [-1, 1.5, -0.5, 0, 0],
                     [0, -0.5, 1, -0.5, 0],
                     [0, 0, -0.5, 1.5, -1],
                     [0, 0, 0, -1, 1]])
    np.testing.assert_allclose(C, want)
    np.testing.assert_allclose(C.sum(axis=1), 0, atol=1e-15)


def test_bulk_parameters():
    chain = ResonatorChain(3, 1.0, 2.0)
    cell = bulk_cell(chain)
    np.testing.assert_allclose(cell.b, [-1, -0.5])
    np.testing.assert_allclose(cell.a, [1.5, 1.5])
    assert interface_spec(chain).eta == pytest.approx(1.0)


@pytest.mark.parametrize("s1,s2", [(1.0, 2.0), (2.0, 1.0)])
def test_mirror_symmetry_and_interface_equivalence(s1, s2):
    chain = ResonatorChain(4, s1, s2, V)
    C = generalized_capacitance(chain).to_dense()
    np.testing.assert_array_equal(C, C[::-1, ::-1])
    M = assemble_interface(interface_spec(chain), 2 * chain.m // 2).to_dense()
    assert M.shape == C.shape
    # identical away from the two boundary corners
    np.testing.assert_allclose(M[1:-1, 1:-1], C[1:-1, 1:-1], atol=1e-14)


def test_generalized_capacitance_scaling():
    chain = ResonatorChain(2, 1.0, 2.0)
    np.testing.assert_allclose(generalized_capacitance(chain).to_dense(),
                               capacitance_matrix(chain).to_dense())
    rot = generalized_capacitance(ResonatorChain(2, 1.0, 2.0, V)).to_dense()
    np.testing.assert_allclose(rot, np.exp(-2j) * capacitance_matrix(chain).to_dense())


def test_resonances():
    res = resonances(ResonatorChain(5, 2.0, 1.0))
    assert np.abs(res.lam.imag).max() < 1e-12
    np.testing.assert_allclose(res.omega, np.sqrt(1e-3 * res.lam))
    small = resonances(ResonatorChain(5, 2.0, 1.0, delta=1e-8))
    assert np.abs(small.omega).max() < 1e-3


def test_chain_validation():
    with pytest.raises(ConfigError):
        ResonatorChain(0, 1, 2)
    with pytest.raises(ConfigError):
        ResonatorChain(2, -1, 2)


@pytest.mark.parametrize("s1,s2,parity", [(2.0, 1.0, "dipole"), (1.0, 2.0, "monopole")])
def test_gap_mode_parity(s1, s2, parity):
    chain = ResonatorChain(10, s1, s2, V)
    dec = eigs_dense(generalized_capacitance(chain).to_dense(), want_vectors=True)
    gap = gap_eigenvalues(chain, dec.values)
    assert gap.size == 1
    i = int(np.argmin(np.abs(dec.values - gap[0])))
    assert classify_parity(dec.vectors[:, i]) == parity


def test_edge_mode_value():
    chain = ResonatorChain(10, 2.0, 1.0, V)
    lam = gap_eigenvalues(chain, resonances(chain).lam)
    # B0 of the bulk cell is alpha v^2 = 1.5 v^2
    assert lam[0] == pytest.approx(1.5 * V ** 2, abs=1e-5)


def test_sweep_zero_perturbation_is_baseline():
    chain = ResonatorChain(6, 1.0, 2.0, V)
    rows = robustness_sweep(chain, "all_spacings", [0.0], trials=2)
    base = np.sort_complex(resonances(chain).lam)
    for t in (0, 1):
        got = np.array([complex(r[3], r[4]) for r in rows if r[1] == t])
        np.testing.assert_allclose(np.sort_complex(got), base, atol=1e-12)
    assert with_interface_spacing(chain, 2.0).to_dense() == pytest.approx(
        generalized_capacitance(chain).to_dense())


def test_sweep_is_reproducible():
    chain = ResonatorChain(3, 1.0, 2.0, V)
    a = robustness_sweep(chain, "all_spacings", [0.1, 0.2], trials=3, seed=7)
    b = robustness_sweep(chain, "all_spacings", [0.1, 0.2], trials=3, seed=7)
    c = robustness_sweep(chain, "all_spacings", [0.1, 0.2], trials=3, seed=8)
    assert a == b and a != c
    with pytest.raises(ConfigError):
        robustness_sweep(chain, "unknown", [0.1])


def test_adjusted_neighbours():
    chain = ResonatorChain(3, 1.0, 2.0)
    M = with_interface_spacing(chain, 4.0, adjust_neighbours=True).to_dense()
    np.testing.assert_allclose(M.sum(axis=1), 0, atol=1e-14)
    c = chain.n // 2
    assert M[c, c] == pytest.approx(0.5) and M[c - 1, c - 1] == pytest.approx(1.25)
