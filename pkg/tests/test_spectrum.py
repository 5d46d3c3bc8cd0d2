import numpy as np
import pytest

from bosewalk import (
    LatticeSpec,
    NumericalError,
    band_gap,
    build_basis,
    build_hamiltonian,
    classify_bound,
    evolve,
    full_spectrum,
    initial_state,
    pair_wavefunction,
)
from bosewalk.spectrum import degenerate_clusters


def spectrum(M, U, J=1.0):
    spec = LatticeSpec(M, J, U)
    basis = build_basis(spec)
    return full_spectrum(build_hamiltonian(spec, basis), basis)


@pytest.fixture(scope="module")
def s8():
    return spectrum(29, 8.0)


@pytest.fixture(scope="module")
def s_8():
    return spectrum(29, -8.0)


def test_counts(s8):
    assert len(s8) == 435
    assert s8.bound_count == 29
    assert s8.scattering_count == 406
    assert np.all(np.diff(s8.energies) >= 0)


def test_orthonormal(s8):
    V = s8.vectors
    assert np.max(np.abs(V.T @ V - np.eye(len(s8)))) <= 1e-9


def test_bound_band_follows_dispersion(s8):
    # infinite-chain miniband: E(K) = sqrt(U^2 + 16 J^2 cos^2(K/2)) spans [U, sqrt(U^2 + 16)]
    E = s8.energies[s8.bound]
    assert E.min() >= 8.0 - 0.05
    assert E.max() <= np.sqrt(80.0) + 0.05


def test_dispersion_against_quasi_momentum():
    s = spectrum(41, 8.0)
    E = s.energies[s.bound]
    K = s.K[s.bound]
    model = np.sqrt(64 + 16 * np.cos(K / 2) ** 2)
    # K is approximate on the open chain; the bulk of the band still tracks E(K)
    assert np.median(np.abs(E - model)) < 0.05


def test_inverted_spectrum(s8, s_8):
    np.testing.assert_allclose(s_8.energies, -s8.energies[::-1], atol=1e-10)
    assert s_8.bound_count == 29
    assert band_gap(s_8) == pytest.approx(band_gap(s8), abs=1e-10)


def test_mirrored_eigenstates_share_profiles(s8, s_8):
    n = len(s8)
    for i in range(0, n, 7):
        r, p_plus = pair_wavefunction(s8.state(i))
        _, p_minus = pair_wavefunction(s_8.state(n - 1 - i))
        np.testing.assert_allclose(p_plus, p_minus, atol=1e-9)


def test_huge_interaction_bound_states_are_doublons():
    s = spectrum(21, 1e6)
    assert s.bound_count == 21
    assert np.all(s.doublon_weight[s.bound] >= 0.999)
    for i in np.flatnonzero(s.bound):
        r, p = pair_wavefunction(s.state(i))
        assert p[r == 0][0] >= 0.999


def test_scattering_states_avoid_contact(s8):
    for i in np.flatnonzero(~s8.bound):
        r, p = pair_wavefunction(s8.state(i))
        assert p[r == 0][0] <= 0.05


def test_noninteracting_doublon_weight():
    # At U = 0 a single eigenstate (the staggered doublon superposition
    # sum_r (-1)^r |r, r>) has D = 1; every other state stays well below 1/2.
    s = spectrum(29, 0.0)
    assert s.bound_count == 1
    D = np.sort(s.doublon_weight)
    assert D[-1] == pytest.approx(1.0, abs=1e-9)
    assert D[-2] < 0.5


def test_classify_threshold(s8):
    s = spectrum(15, 8.0)
    classify_bound(s, 0.99)
    assert s.bound_count < 15
    classify_bound(s, 0.5)
    assert s.bound_count == 15
    with pytest.raises(Exception):
        classify_bound(s, 1.5)


def test_gap_u8(s8):
    assert abs(band_gap(s8) - 4.0) <= 0.1


def test_gap_closes_near_four():
    assert abs(band_gap(spectrum(29, 4.05))) <= 0.15


def test_gap_grows_with_unit_slope():
    gaps = [band_gap(spectrum(29, U)) for U in (6, 8, 10, 12)]
    assert np.all(np.diff(gaps) > 0)
    slope = (gaps[-1] - gaps[-2]) / 2
    assert slope == pytest.approx(1.0, abs=0.05)


def test_gap_without_miniband():
    s = spectrum(9, 0.0)
    classify_bound(s, 0.999999999999)
    s.bound[:] = False
    with pytest.raises(NumericalError, match="no miniband"):
        band_gap(s)


def test_completeness(s8):
    basis = s8.basis
    for desc in ("doublon@14", "adjacent@14", "pair@0,28"):
        assert s8.overlaps(initial_state(desc, basis)).sum() == pytest.approx(1.0, abs=1e-10)


def test_spectral_selection_rule(s8):
    basis = s8.basis
    assert s8.bound_weight(initial_state("doublon@14", basis)) >= 0.9
    assert s8.bound_weight(initial_state("adjacent@14", basis)) <= 0.1


def test_dynamics_through_spectrum(s8):
    spec = LatticeSpec(29, U=8.0)
    psi0 = initial_state("adjacent@14", s8.basis)
    a = evolve(psi0, s8.eigensystem(), 4.0)
    b = evolve(psi0, build_hamiltonian(spec, s8.basis), 4.0)
    np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-10)


def test_pair_wavefunction_normalized(s8):
    r, p = pair_wavefunction(s8.state(100))
    assert p.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(p, p[::-1])
    assert r[0] == -28 and r[-1] == 28


def test_degenerate_clusters():
    groups = degenerate_clusters(np.array([0.0, 1e-12, 1.0, 2.0, 2.0 + 1e-10]))
    assert [g.tolist() for g in groups] == [[0, 1], [2], [3, 4]]
