import numpy as np
import pytest
import scipy.sparse.linalg as spla
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import jv

from bosewalk import (
    ConfigurationError,
    EvolutionSpec,
    LatticeSpec,
    NumericalError,
    UsageError,
    build_basis,
    build_hamiltonian,
    correlation,
    density,
    eigensystem,
    evolve,
    initial_state,
)
from bosewalk.lattice import TwoParticleState
from bosewalk.propagation import lanczos_expm_multiply

from oracles import first_quantized_walk


def _setup(M, U, init, J=1.0):
    spec = LatticeSpec(M, J, U)
    basis = build_basis(spec)
    return basis, build_hamiltonian(spec, basis), initial_state(init, basis)


def test_zero_time_is_identity():
    basis, H, psi0 = _setup(9, 3.0, "adjacent@4")
    out = evolve(psi0, H, EvolutionSpec(0.0))
    assert np.array_equal(out.amplitudes, psi0.amplitudes)
    assert out.amplitudes is not psi0.amplitudes


def test_u0_doublon_density_matches_bessel():
    # far from the edges the chain is effectively infinite:
    # n_r = 2 J_{r-c}(2t)^2 for two independent walkers launched from c
    M, c, t = 81, 40, 4.0
    _, H, psi0 = _setup(M, 0.0, f"doublon@{c}")
    n = density(evolve(psi0, H, t))
    expected = 2 * jv(np.arange(M) - c, 2 * t) ** 2
    np.testing.assert_allclose(n, expected, atol=1e-12)


def test_strong_interaction_keeps_doublon_bound():
    _, H, psi0 = _setup(21, 1e6, "doublon@10")
    G = correlation(evolve(psi0, H, 4.0))
    assert np.trace(np.asarray(G)) >= 1.99


@settings(max_examples=25, deadline=None)
@given(
    M=st.integers(min_value=2, max_value=61),
    U=st.floats(min_value=-30, max_value=30),
    T=st.floats(min_value=0, max_value=20),
    data=st.data(),
)
def test_unitarity(M, U, T, data):
    m = data.draw(st.integers(0, M - 1))
    n = data.draw(st.integers(0, M - 1))
    _, H, psi0 = _setup(M, U, f"pair@{m},{n}")
    psi = evolve(psi0, H, T)
    assert abs(psi.norm() ** 2 - 1) <= 1e-10


@pytest.mark.parametrize("U", [0.0, 2.5, -7.0])
def test_composition(U):
    basis, H, psi0 = _setup(17, U, "adjacent@8")
    es = eigensystem(H)
    two_step = evolve(evolve(psi0, es, 1.3), es, 2.1)
    one_step = evolve(psi0, es, 3.4)
    np.testing.assert_allclose(two_step.amplitudes, one_step.amplitudes, atol=1e-9)


def test_energy_conserved():
    basis, H, psi0 = _setup(23, 4.0, "adjacent@11")
    rng = np.random.default_rng(3)
    amps = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
    psi0 = TwoParticleState(basis, amps / np.linalg.norm(amps))
    e0 = np.vdot(psi0.amplitudes, H @ psi0.amplitudes).real
    psi = evolve(psi0, H, 6.0)
    assert abs(np.vdot(psi.amplitudes, H @ psi.amplitudes).real - e0) <= 1e-9


@pytest.mark.parametrize("init", ["doublon@14", "adjacent@14"])
@pytest.mark.parametrize("U", [0.0, 8.0])
def test_krylov_matches_diagonalization(init, U):
    spec = LatticeSpec(29, U=U)
    basis = build_basis(spec)
    psi0 = initial_state(init, basis)
    ref = evolve(psi0, build_hamiltonian(spec, basis), EvolutionSpec(4.0))
    kry = evolve(psi0, build_hamiltonian(spec, basis, sparse=True), EvolutionSpec(4.0, method="krylov"))
    np.testing.assert_allclose(kry.amplitudes, ref.amplitudes, atol=1e-8)


def test_lanczos_matches_scipy_expm_multiply():
    spec = LatticeSpec(15, U=-3.0)
    H = build_hamiltonian(spec, sparse=True)
    rng = np.random.default_rng(11)
    v = rng.normal(size=H.shape[0]) + 1j * rng.normal(size=H.shape[0])
    ours = lanczos_expm_multiply(H, v, 2.7, tol=1e-12)
    theirs = spla.expm_multiply(-1j * 2.7 * H.astype(complex), v)
    np.testing.assert_allclose(ours, theirs, atol=1e-9 * np.linalg.norm(v))


@pytest.mark.parametrize("sites", [(5, 5), (5, 6), (2, 8)])
@pytest.mark.parametrize("U", [0.0, 3.0, -8.0])
def test_against_first_quantized_dynamics(sites, U):
    M, T = 11, 2.5
    m, n = sites
    _, H, psi0 = _setup(M, U, f"pair@{m},{n}")
    psi = evolve(psi0, H, T)
    n_ref, G_ref = first_quantized_walk(M, 1.0, U, sites, T)
    np.testing.assert_allclose(density(psi), n_ref, atol=1e-10)
    np.testing.assert_allclose(np.asarray(correlation(psi)), G_ref, atol=1e-10)


def test_rejects_unnormalized_input():
    basis, H, psi0 = _setup(5, 0.0, "doublon@2")
    with pytest.raises(UsageError):
        evolve(TwoParticleState(basis, 2 * psi0.amplitudes), H, 1.0)


def test_rejects_dimension_mismatch():
    _, H, _ = _setup(5, 0.0, "doublon@2")
    _, _, psi0 = _setup(6, 0.0, "doublon@2")
    with pytest.raises(UsageError):
        evolve(psi0, H, 1.0)


def test_norm_drift_is_reported_not_hidden():
    basis, H, psi0 = _setup(7, 0.0, "doublon@3")
    # a non-Hermitian perturbation cannot pass the symmetry check
    bad = H.copy()
    bad[0, 1] += 0.5
    with pytest.raises(NumericalError) as exc:
        evolve(psi0, bad, 1.0)
    assert "max_asymmetry" in exc.value.diagnostics


@pytest.mark.parametrize("kwargs", [{"T": -1.0}, {"T": float("inf")}, {"T": 1.0, "method": "rk4"}, {"T": 1.0, "tolerance": 0}])
def test_evolution_spec_validation(kwargs):
    with pytest.raises(ConfigurationError):
        EvolutionSpec(**kwargs)
