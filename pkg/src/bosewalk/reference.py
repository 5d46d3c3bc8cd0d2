"""Closed-form and limiting-case references for two-particle walks.

Non-interacting bosons and fermions follow from the single-particle propagator
``G(t) = exp(-i H_1 t)``; hard-core bosons are evolved directly in the sector
without double occupancy. For hard-core bosons in one dimension the
density-density correlator coincides with the free-fermion one, because the
Jordan-Wigner phase string cancels in ``<a_q^+ a_r^+ a_r a_q>``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla
from scipy.special import jv

from .errors import ConfigurationError
from .lattice import (
    LatticeSpec,
    PairBasis,
    TwoParticleState,
    build_hamiltonian,
    single_particle_hamiltonian,
)
from .observables import CorrelationMatrix, correlation
from .propagation import eigensystem

__all__ = [
    "propagator",
    "bessel_amplitude",
    "boson_correlation_u0",
    "fermion_correlation",
    "hardcore_evolve",
]


def propagator(spec, t):
    """Single-particle propagator ``G[q, m]`` (amplitude at ``q`` from ``m``)."""
    if t < 0:
        raise ConfigurationError(f"time must be >= 0, got {t}", key="T")
    if t == 0:
        return np.eye(spec.M, dtype=complex)
    E, V = sla.eigh(single_particle_hamiltonian(spec))
    return (V * np.exp(-1j * E * t)) @ V.T


def bessel_amplitude(r, t, J=1.0):
    """Infinite-chain propagator ``i^r J_r(2 J t)`` for a displacement ``r``."""
    r = np.asarray(r)
    return (1j) ** r * jv(r, 2.0 * J * t)


def _check_sites(spec, sites):
    m, n = sites
    for s in (m, n):
        if not 0 <= s < spec.M:
            raise ConfigurationError(f"input site {s} outside lattice of {spec.M} sites", key="initial")
    return int(m), int(n)


def boson_correlation_u0(spec, sites, t, G=None):
    """Pair correlation of two free bosons started on ``sites = (m, n)``.

    ``Gamma_qr = |G_qm G_rn + G_qn G_rm|^2 / (1 + delta_mn)``.
    """
    m, n = _check_sites(spec, sites)
    if G is None:
        G = propagator(spec, t)
    a, b = G[:, m], G[:, n]
    amp = np.outer(a, b) + np.outer(b, a)
    gamma = np.abs(amp) ** 2 / (2.0 if m == n else 1.0)
    return CorrelationMatrix(gamma)


def fermion_correlation(spec, sites, t, G=None):
    """Pair correlation of two free fermions (Slater determinant) on ``sites``."""
    m, n = _check_sites(spec, sites)
    if m == n:
        raise ConfigurationError("two fermions cannot start on the same site", key="initial")
    if G is None:
        G = propagator(spec, t)
    a, b = G[:, m], G[:, n]
    gamma = np.abs(np.outer(a, b) - np.outer(b, a)) ** 2
    np.fill_diagonal(gamma, 0.0)
    return CorrelationMatrix(gamma)


def hardcore_evolve(spec, sites, t):
    """Pair correlation of two hard-core bosons after time ``t``.

    The walk runs in the ``M(M-1)/2`` dimensional basis of distinct-site pairs
    with the hopping-only Hamiltonian; ``spec.U`` is ignored.
    """
    m, n = _check_sites(spec, sites)
    if m == n:
        raise ConfigurationError("hard-core bosons cannot start on the same site", key="initial")
    basis = PairBasis(spec.M, hardcore=True)
    H = build_hamiltonian(LatticeSpec(spec.M, spec.J, 0.0), basis)
    psi = np.zeros(len(basis), dtype=complex)
    psi[basis.index(m, n)] = 1.0
    if t > 0:
        psi = eigensystem(H).propagate(psi, t)
    return correlation(TwoParticleState(basis, psi))
