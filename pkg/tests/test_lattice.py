import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosewalk import ConfigurationError, LatticeSpec, UsageError, build_basis, build_hamiltonian, initial_state
from bosewalk.lattice import PairBasis, parse_initial

from oracles import fock_hamiltonian, occupation_to_pair


@pytest.mark.parametrize("M, dim", [(2, 3), (3, 6), (29, 435)])
def test_basis_dimension(M, dim):
    assert len(build_basis(LatticeSpec(M))) == dim == M * (M + 1) // 2


def test_basis_m2_pairs():
    assert build_basis(LatticeSpec(2)).pairs == [(0, 0), (0, 1), (1, 1)]


def test_basis_lexicographic():
    pairs = build_basis(LatticeSpec(7)).pairs
    assert pairs == sorted(pairs)
    assert len(set(pairs)) == len(pairs)


@given(st.integers(min_value=2, max_value=40))
def test_basis_roundtrip(M):
    basis = PairBasis(M)
    for i in range(len(basis)):
        assert basis.index(*basis.pair(i)) == i
        r1, r2 = basis.pair(i)
        assert basis.index(r2, r1) == i


def test_hardcore_basis():
    basis = PairBasis(6, hardcore=True)
    assert len(basis) == 15
    assert not basis.doublon_mask.any()
    with pytest.raises(ConfigurationError):
        basis.index(2, 2)


@pytest.mark.parametrize("M", [1, 0, -3])
def test_invalid_size(M):
    with pytest.raises(ConfigurationError):
        LatticeSpec(M)


def test_invalid_hopping():
    with pytest.raises(ConfigurationError):
        LatticeSpec(5, J=0.0)
    with pytest.raises(ConfigurationError):
        LatticeSpec(5, U=float("nan"))


def test_hamiltonian_m2_elements():
    spec = LatticeSpec(2, J=1.0, U=5.0)
    basis = build_basis(spec)
    H = build_hamiltonian(spec, basis)
    i00, i01, i11 = basis.index(0, 0), basis.index(0, 1), basis.index(1, 1)
    assert H[i00, i00] == 5.0
    assert H[i01, i01] == 0.0
    assert H[i00, i01] == pytest.approx(-math.sqrt(2), abs=1e-15)
    assert H[i11, i01] == pytest.approx(-math.sqrt(2), abs=1e-15)
    assert H[i00, i11] == 0.0


@pytest.mark.parametrize("M, J, U", [(2, 1.0, 5.0), (3, 1.0, -2.5), (5, 0.7, 3.3), (6, 1.3, 0.0)])
def test_hamiltonian_matches_occupation_basis(M, J, U):
    # oracle: operators applied to occupation-number states
    Hf, states = fock_hamiltonian(M, J, U)
    spec = LatticeSpec(M, J, U)
    basis = build_basis(spec)
    H = build_hamiltonian(spec, basis)
    perm = [basis.index(*occupation_to_pair(s)) for s in states]
    np.testing.assert_allclose(H[np.ix_(perm, perm)], Hf, atol=1e-14)


def test_hamiltonian_m3_coupling_count():
    # hand count: (00)-(01), (01)-(11), (11)-(12), (12)-(22) carry sqrt(2);
    # (01)-(02), (02)-(12) carry 1
    spec = LatticeSpec(3, U=2.0)
    H = build_hamiltonian(spec)
    off = H - np.diag(np.diag(H))
    assert np.count_nonzero(off) == 12
    assert np.count_nonzero(np.isclose(off, -math.sqrt(2))) == 8
    assert np.count_nonzero(np.isclose(off, -1.0)) == 4


@settings(max_examples=30, deadline=None)
@given(
    st.integers(min_value=2, max_value=20),
    st.floats(min_value=0.1, max_value=3.0),
    st.floats(min_value=-50, max_value=50),
)
def test_hamiltonian_structure(M, J, U):
    spec = LatticeSpec(M, J, U)
    basis = build_basis(spec)
    H = build_hamiltonian(spec, basis)
    assert np.array_equal(H, H.T)
    diag = np.diag(H)
    assert np.array_equal(diag[basis.doublon_mask], np.full(M, U))
    assert np.all(diag[~basis.doublon_mask] == 0)
    off = H[~np.eye(len(basis), dtype=bool)]
    nz = off[off != 0]
    assert np.all(np.isclose(nz, -J) | np.isclose(nz, -J * math.sqrt(2)))


def test_sparse_matches_dense():
    spec = LatticeSpec(9, U=-1.5)
    np.testing.assert_array_equal(build_hamiltonian(spec, sparse=True).toarray(), build_hamiltonian(spec))


def test_basis_mismatch():
    with pytest.raises(UsageError):
        build_hamiltonian(LatticeSpec(5), build_basis(LatticeSpec(6)))


def test_initial_states():
    basis = build_basis(LatticeSpec(5))
    psi = initial_state("doublon", basis, 0)
    assert psi.amplitude(0, 0) == 1 and np.count_nonzero(psi.amplitudes) == 1
    psi = initial_state("adjacent@1", basis)
    assert psi.amplitude(1, 2) == 1 and np.count_nonzero(psi.amplitudes) == 1
    psi = initial_state("pair@4,1", basis)
    assert psi.amplitude(1, 4) == 1
    assert psi.norm() == 1.0


@pytest.mark.parametrize("desc", ["doublon@5", "adjacent@4", "pair@0,7", "pair@-1,2"])
def test_initial_state_out_of_range(desc):
    with pytest.raises(ConfigurationError):
        initial_state(desc, build_basis(LatticeSpec(5)))


@pytest.mark.parametrize("text", ["doublon", "walk@3", "pair@3", "adjacent@1,2"])
def test_parse_initial_rejects(text):
    with pytest.raises(ConfigurationError):
        parse_initial(text)
